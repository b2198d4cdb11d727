"""Minimal deterministic SVG line charts for experiment results.

One chart per (image, metric), mirroring the experiment axes: manipulation
fraction or compression level on X, PSNR (with a 36 dB marker) or hash
distance (with the IWT-threshold marker) on Y. Plain polylines, no styling
ambitions.
"""

from __future__ import annotations

import math
from pathlib import Path

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 62, 20, 28, 46


def _finite(points):
    return [(x, y) for x, y in points if not (math.isnan(y) or math.isinf(y))]


def _svg_header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:g}" y="18" text-anchor="middle" font-size="14">{title}</text>',
    ]


def line_chart(series: dict[str, list[tuple[float, float]]], title: str,
               x_label: str, y_label: str, marker_y: float | None = None,
               marker_label: str = "") -> str:
    """Render named (x, y) series to an SVG string."""
    cleaned = {name: _finite(pts) for name, pts in series.items()}
    all_pts = [p for pts in cleaned.values() for p in pts]
    if not all_pts:
        return "\n".join(_svg_header(title) + ["</svg>"]) + "\n"
    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    if marker_y is not None and not math.isnan(marker_y):
        ys.append(marker_y)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pad = 0.05 * (y_hi - y_lo) or 1.0
    y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MT + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = _svg_header(title)
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333"/>'
    )
    for i in range(5):
        xv = x_lo + i * (x_hi - x_lo) / 4
        yv = y_lo + pad + i * (y_hi - y_lo - 2 * pad) / 4
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{_H - _MB + 16}" text-anchor="middle">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{sy(yv):.1f}" text-anchor="end" '
            f'dominant-baseline="middle">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{_ML + plot_w / 2:g}" y="{_H - 8}" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MT + plot_h / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + plot_h / 2:g})">{y_label}</text>'
    )
    if marker_y is not None and not math.isnan(marker_y):
        parts.append(
            f'<line x1="{_ML}" y1="{sy(marker_y):.1f}" x2="{_ML + plot_w}" '
            f'y2="{sy(marker_y):.1f}" stroke="#888" stroke-dasharray="6 3"/>'
        )
        if marker_label:
            parts.append(
                f'<text x="{_ML + 4}" y="{sy(marker_y) - 4:.1f}" fill="#666">{marker_label}</text>'
            )
    for i, (name, pts) in enumerate(cleaned.items()):
        if not pts:
            continue
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(pts))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}"/>')
        parts.append(
            f'<text x="{_W - _MR - 120}" y="{_MT + 16 + 16 * i}" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_experiment_charts(records, out_dir) -> list[Path]:
    """One SVG per (image, metric) for a list of ExperimentRecords."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    experiments = sorted({r.experiment for r in records})
    for experiment in experiments:
        exp_records = [r for r in records if r.experiment == experiment and r.status == "ok"]
        x_label = "manipulated fraction" if experiment == "manipulation" else "compression level"
        for image in sorted({r.image for r in exp_records}):
            img_records = [r for r in exp_records if r.image == image]
            for metric, y_label, marker, marker_label in (
                ("psnr_db", "PSNR [dB]", 36.0, "36 dB"),
                ("hamming_mean", "hash distance", _threshold_of(img_records), "IWT min"),
            ):
                series: dict[str, list[tuple[float, float]]] = {}
                for r in img_records:
                    series.setdefault(r.scheme, []).append((r.level_or_k, getattr(r, metric)))
                svg = line_chart(
                    series, f"{experiment}: {image}", x_label, y_label,
                    marker_y=marker, marker_label=marker_label,
                )
                path = out_dir / f"{experiment}_{image}_{metric}.svg"
                path.write_text(svg)
                written.append(path)
    return written


def _threshold_of(records) -> float:
    for r in records:
        if not math.isnan(r.iwt_threshold):
            return r.iwt_threshold
    return math.nan
