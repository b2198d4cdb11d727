"""Acceptance gate: one test per criterion, at the stated tolerances.

Runs at desk scale (three 512x512 RGB scenes). The manipulation sweep
(3 images x 4 schemes x 10 manipulation counts x 20 repeats) dominates the
runtime. Run with ``pytest tests/test_acceptance.py -v -s`` to see one
PASS/FAIL line per criterion.
"""

import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from stegohash.compression import klt_reconstruct_channel
from stegohash.embedding import EmbedderConfig, SCHEMES, embed, extract, qim_embed, qim_extract
from stegohash.experiments import (
    ExperimentConfig,
    iwt_threshold_from,
    records_to_csv,
    run_compression_experiment,
    run_manipulation_experiment,
)
from stegohash.imagecore import load_png, save_png
from stegohash.perceptual import psnr
from stegohash.testimages import synthetic_lenna
from stegohash.transforms import iwt_forward, iwt_inverse

SEED = 20260810


def _report(criterion: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def experiment_config(images):
    return ExperimentConfig(
        images=tuple(images.items()),
        schemes=SCHEMES,
        n_repeats=20,
        rng_seed=SEED,
    )


@pytest.fixture(scope="module")
def manipulation_records(experiment_config):
    return run_manipulation_experiment(experiment_config)


@pytest.fixture(scope="module")
def compression_records(experiment_config, manipulation_records):
    return run_compression_experiment(experiment_config, manipulation_records)


def test_criterion_1_calibration_reproduction(images, message10):
    targets = {
        ("dct-qim", "peppers"): 35.92,
        ("dwt-qim", "baboon"): 35.84,
        ("iwt", "lenna"): 35.68,
        ("qr-lsb", "peppers"): 35.80,
    }
    details = []
    ok = True
    for (scheme, image), target in targets.items():
        value = psnr(images[image], embed(images[image], message10, EmbedderConfig(scheme=scheme)))
        good = abs(value - target) <= 1.0
        ok &= good
        details.append(f"{scheme}/{image}={value:.2f} (target {target}+-1.0)")
    _report(1, ok, "; ".join(details))


def test_criterion_2_round_trip_integrity(images, message10, tmp_path):
    failures = []
    for scheme in SCHEMES:
        cfg = EmbedderConfig(scheme=scheme)
        for name, img in images.items():
            emb = embed(img, message10, cfg)
            if extract(emb, cfg) != message10:
                failures.append(f"{scheme}/{name}")
                continue
            path = tmp_path / f"{scheme}_{name}.png"
            save_png(emb, path)
            if extract(load_png(path), cfg) != message10:
                failures.append(f"{scheme}/{name}:png")
    _report(2, not failures, f"12/12 scheme x image round-trips exact"
            if not failures else f"failed: {failures}")


def test_criterion_3_qim_property_suite():
    xs = np.arange(-1000.0, 1000.0 + 1e-9, 0.37)
    total = 0
    failures = 0
    max_rel_disp = 0.0
    for q in range(10, 81):
        q = float(q)
        for m in (0, 1):
            ys = qim_embed(xs, np.full(xs.shape, m, dtype=int), q)
            decoded = qim_extract(ys, q)
            failures += int(np.count_nonzero(decoded != m))
            disp = np.max(np.abs(ys - xs))
            max_rel_disp = max(max_rel_disp, disp / q)
            failures += int(disp >= q)
            total += xs.size
    _report(3, failures == 0,
            f"{total} encode/decode pairs, 0 required failures, "
            f"max |x'-x|/q_s = {max_rel_disp:.3f} < 1")


def test_criterion_4_iwt_perfect_reconstruction(images):
    bad = 0
    for img in images.values():
        for channel in img.planes:
            if not np.array_equal(iwt_inverse(iwt_forward(channel)), channel):
                bad += 1
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        h = 2 * int(rng.integers(1, 33))
        w = 2 * int(rng.integers(1, 33))
        grid = rng.integers(0, 256, (h, w))
        if not np.array_equal(iwt_inverse(iwt_forward(grid)), grid):
            bad += 1
    _report(4, bad == 0, f"test images + 1000 random even-dimension grids, {bad} mismatches")


def test_criterion_5_manipulation_trend(manipulation_records):
    details = []
    ok = True
    maxima = {}
    for image in ("lenna", "baboon", "peppers"):
        rows = sorted(
            (r.level_or_k, r.hamming_mean)
            for r in manipulation_records
            if r.scheme == "iwt" and r.image == image and r.status == "ok" and r.level_or_k > 0
        )
        ks = [k for k, _ in rows]
        means = [m for _, m in rows]
        rho = float(spearmanr(ks, means).statistic)
        peak = max(means)
        maxima[image] = peak
        good = rho >= 0.8 and 0.03 <= peak <= 0.09
        ok &= good
        details.append(f"{image}: rho={rho:.2f} max={peak:.4f}")
    order = maxima["baboon"] > maxima["lenna"]
    ok &= order
    details.append(f"baboon>lenna: {order}")
    _report(5, ok, "; ".join(details))


def test_criterion_6_frequency_scheme_noise_determinism(manipulation_records):
    worst = 0.0
    cells = 0
    for r in manipulation_records:
        if r.scheme in ("dct-qim", "dwt-qim") and r.status == "ok" and r.level_or_k > 0:
            worst = max(worst, r.psnr_vs_source_std)
            cells += 1
    _report(6, worst < 0.05 and cells == 60,
            f"{cells} DCT/DWT cells, worst source-PSNR std {worst:.4f} dB < 0.05")


def test_criterion_7_compression_psnr(compression_records):
    baboon = [r for r in compression_records if r.image == "baboon" and r.status == "ok"]
    worst_baboon = max(r.psnr_db for r in baboon)
    ok = worst_baboon < 30.0 and len(baboon) == 29
    details = [f"baboon: {len(baboon)} cells, max {worst_baboon:.1f} dB < 30"]
    for image in ("lenna", "peppers"):
        rows = [
            r for r in compression_records
            if r.image == image and r.scheme in ("dct", "klt") and r.level_or_k >= 0.19
        ]
        low = min(r.psnr_db for r in rows)
        good = low > 30.0 and len(rows) == 8
        ok &= good
        details.append(f"{image}: dct/klt >=20% min {low:.1f} dB > 30")
    _report(7, ok, "; ".join(details))


def test_criterion_8_discrimination(compression_records, manipulation_records):
    thr_baboon = iwt_threshold_from(manipulation_records, "baboon")
    klt_baboon = max(
        r.hamming_mean for r in compression_records
        if r.image == "baboon" and r.scheme == "klt" and r.status == "ok"
    )
    separable = klt_baboon < thr_baboon
    thr_peppers = iwt_threshold_from(manipulation_records, "peppers")
    witnesses = [
        (r.scheme, r.param, round(r.hamming_mean, 4))
        for r in compression_records
        if r.image == "peppers" and r.status == "ok"
        and 0.10 <= r.level_or_k <= 0.71 and r.hamming_mean > thr_peppers
    ]
    ok = separable and len(witnesses) > 0
    _report(8, ok,
            f"baboon: max KLT hamming {klt_baboon:.4f} < IWT min {thr_baboon:.4f} (separable); "
            f"peppers: {len(witnesses)} compressor cells in levels 10-70% above "
            f"IWT min {thr_peppers:.4f} (non-separable), e.g. {witnesses[:3]}")


def test_criterion_9_determinism():
    img = ("lenna128", synthetic_lenna(128))
    cfg = ExperimentConfig(images=(img,), schemes=SCHEMES, n_repeats=3, rng_seed=SEED)
    man_a = records_to_csv(run_manipulation_experiment(cfg))
    man_b = records_to_csv(run_manipulation_experiment(cfg))
    comp_a = records_to_csv(run_compression_experiment(cfg))
    comp_b = records_to_csv(run_compression_experiment(cfg))
    ok = man_a == man_b and comp_a == comp_b
    _report(9, ok, "same-seed reruns produce byte-identical CSVs for both experiments")


def test_criterion_10_klt_sanity(images):
    worst_err = 0.0
    for channel in images["lenna"].planes:
        recon = klt_reconstruct_channel(channel, 64)
        worst_err = max(worst_err, float(np.max(np.abs(recon - channel.astype(np.float64)))))
    matched = []
    from stegohash.compression import compress_dct, compress_klt

    ok = worst_err < 1e-6
    for level, kept in ((0.70, 45), (0.50, 32), (0.30, 19), (0.20, 13), (0.10, 6), (0.05, 3), (0.02, 1)):
        p_dct = psnr(images["lenna"], compress_dct(images["lenna"], level).image)
        p_klt = psnr(images["lenna"], compress_klt(images["lenna"], kept).image)
        matched.append(p_klt >= p_dct)
    ok &= all(matched)
    _report(10, ok,
            f"full-basis reconstruction error {worst_err:.2e} < 1e-6; "
            f"KLT >= DCT at all 7 matched fractions: {all(matched)}")
