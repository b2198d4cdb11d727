"""Command-line surface.

Subcommands: embed, extract, metrics, compress, experiment, fetch-testimages.
Exit codes: 1 usage errors, 2 capacity/placement/extraction errors, 3 I/O
errors. Diagnostics go to stderr, data to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

import yaml

from . import __version__
from .charts import write_experiment_charts
from .compression import ALGORITHMS, compress
from .embedding import EmbedderConfig, Message, SCHEMES, embed, extract
from .exceptions import (
    CapacityError,
    ExtractionError,
    PlacementError,
    StegohashError,
    UnsupportedImageError,
)
from .experiments import (
    ExperimentConfig,
    generate_message,
    run_compression_experiment,
    run_manipulation_experiment,
    write_records,
)
from .imagecore import load_png, save_png
from .perceptual import block_hash, hamming_distance, psnr
from .testimages import fetch_testimages, load_manifest

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _embedder_config(args) -> EmbedderConfig:
    cfg = EmbedderConfig(scheme=args.scheme)
    if getattr(args, "lsb_depth", None) is not None:
        cfg = replace(cfg, lsb_depth=args.lsb_depth)
    if getattr(args, "qs", None) is not None:
        cfg = replace(cfg, qs_dct=args.qs, qs_dwt=args.qs)
    if getattr(args, "ecc", None) is not None:
        cfg = replace(cfg, qr_ecc_level=args.ecc)
    if getattr(args, "n_elements", None) is not None:
        cfg = replace(cfg, n_elements=args.n_elements)
    return cfg


def _load_message(args, cfg: EmbedderConfig) -> Message:
    if args.message is not None:
        data = Path(args.message).read_bytes()
        return Message.from_bytes(data)
    return generate_message(args.seed, cfg.n_elements)


def _cmd_embed(args) -> int:
    img = load_png(args.image)
    cfg = _embedder_config(args)
    msg = _load_message(args, cfg)
    cfg = replace(cfg, n_elements=msg.n_elements)
    out = embed(img, msg, cfg)
    out_path = Path(args.out) if args.out else Path(args.image).with_suffix(f".{args.scheme}.png")
    save_png(out, out_path)
    quality = psnr(img, out)
    sidecar = {
        "scheme": cfg.scheme,
        "config": asdict(cfg),
        "psnr_db": quality,
        "message_bytes": len(msg.to_bytes()),
        "source": str(args.image),
        "output": str(out_path),
    }
    Path(str(out_path) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")
    print(f"embedded -> {out_path} psnr={quality:.2f} dB")
    return 0


def _cmd_extract(args) -> int:
    img = load_png(args.image)
    cfg = _embedder_config(args)
    msg = extract(img, cfg)
    raw = msg.to_bytes()
    if args.out:
        Path(args.out).write_bytes(raw)
        print(f"extracted {len(raw)} bytes -> {args.out}")
    else:
        print(raw.hex())
    return 0


def _cmd_metrics(args) -> int:
    a = load_png(args.image_a)
    b = load_png(args.image_b)
    value = psnr(a, b)
    hd = hamming_distance(block_hash(a), block_hash(b))
    psnr_text = "inf" if value == float("inf") else f"{value:.4f}"
    print(f"psnr={psnr_text} hamming={hd}")
    return 0


def _cmd_compress(args) -> int:
    img = load_png(args.image)
    result = compress(img, args.algorithm, args.level)
    out_path = Path(args.out) if args.out else Path(args.image).with_suffix(f".{args.algorithm}.png")
    save_png(result.image, out_path)
    meta = {
        "algorithm": result.algorithm,
        "params": result.params,
        "achieved_level": result.level,
        "psnr_db": psnr(img, result.image),
        "source": str(args.image),
        "output": str(out_path),
    }
    Path(str(out_path) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"compressed -> {out_path} level={result.level:.4f} psnr={meta['psnr_db']:.2f} dB")
    return 0


def _experiment_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        allowed = {"schemes", "n_elements", "n_repeats", "rng_seed", "compression_grid"}
        unknown = set(loaded) - allowed - {"images"}
        if unknown:
            raise StegohashError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(
            cfg,
            schemes=tuple(loaded.get("schemes", cfg.schemes)),
            n_elements=int(loaded.get("n_elements", cfg.n_elements)),
            n_repeats=int(loaded.get("n_repeats", cfg.n_repeats)),
            rng_seed=int(loaded.get("rng_seed", cfg.rng_seed)),
            compression_grid=loaded.get("compression_grid", cfg.compression_grid),
        )
        if "images" in loaded and not args.images:
            cfg = replace(cfg, images=tuple(loaded["images"]))
    if args.images:
        cfg = replace(cfg, images=tuple(args.images))
    if args.seed is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    if args.repeats is not None:
        cfg = replace(cfg, n_repeats=args.repeats)
    if args.schemes:
        cfg = replace(cfg, schemes=tuple(args.schemes))
    return cfg


def _cmd_experiment(args) -> int:
    cfg = _experiment_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(json.dumps({
        "kind": args.kind,
        "images": [str(i) for i in cfg.images],
        "schemes": list(cfg.schemes),
        "n_elements": cfg.n_elements,
        "n_repeats": cfg.n_repeats,
        "rng_seed": cfg.rng_seed,
        "compression_grid": cfg.compression_grid,
    }, indent=2) + "\n")

    manipulation_records = None
    if args.kind in ("manipulation", "both"):
        manipulation_records = run_manipulation_experiment(cfg)
        write_records(
            manipulation_records,
            out_dir / "manipulation.csv",
            out_dir / "manipulation_aux.csv",
        )
        write_experiment_charts(manipulation_records, out_dir)
        print(f"manipulation: {len(manipulation_records)} records -> {out_dir / 'manipulation.csv'}")
    if args.kind in ("compression", "both"):
        compression_records = run_compression_experiment(cfg, manipulation_records)
        write_records(
            compression_records,
            out_dir / "compression.csv",
            out_dir / "compression_aux.csv",
        )
        write_experiment_charts(compression_records, out_dir)
        print(f"compression: {len(compression_records)} records -> {out_dir / 'compression.csv'}")
    return 0


def _cmd_fetch(args) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else None
    paths = fetch_testimages(
        args.out_dir, manifest=manifest, offline=args.offline, synthetic=args.synthetic
    )
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stegohash", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a message into an image")
    p.add_argument("image")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--seed", type=int, default=0, help="seed for a generated message")
    p.add_argument("--message", help="file with raw message bytes (23-byte elements)")
    p.add_argument("--out")
    p.add_argument("--lsb-depth", type=int, dest="lsb_depth")
    p.add_argument("--qs", type=float, help="quantizer step for the QIM schemes")
    p.add_argument("--ecc", choices=("L", "M", "Q", "H"))
    p.add_argument("--n-elements", type=int, dest="n_elements")
    p.set_defaults(fn=_cmd_embed)

    p = sub.add_parser("extract", help="extract an embedded message")
    p.add_argument("image")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--out", help="write raw bytes here instead of hex to stdout")
    p.add_argument("--lsb-depth", type=int, dest="lsb_depth")
    p.add_argument("--qs", type=float)
    p.add_argument("--ecc", choices=("L", "M", "Q", "H"))
    p.add_argument("--n-elements", type=int, dest="n_elements")
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("metrics", help="PSNR and hash distance between two images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("compress", help="run one lossy compression simulator")
    p.add_argument("image")
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--level", type=float, required=True,
                   help="dct: fraction; dwt: stages; klt: eigenvectors; "
                        "quadtree: max depth; spline: keep-every-n")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_compress)

    p = sub.add_parser("experiment", help="run the measurement sweeps")
    p.add_argument("kind", choices=("manipulation", "compression", "both"))
    p.add_argument("--images", nargs="+", help="PNG paths (defaults from --config)")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--schemes", nargs="+", choices=SCHEMES)
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("fetch-testimages", help="materialize the test images")
    p.add_argument("--out-dir", default="testimages")
    p.add_argument("--manifest", help="JSON manifest with urls and pinned digests")
    p.add_argument("--offline", action="store_true", help="accept pre-placed files")
    p.add_argument("--synthetic", action="store_true",
                   help="write the deterministic synthetic stand-ins")
    p.set_defaults(fn=_cmd_fetch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CapacityError, PlacementError, ExtractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, PermissionError, IsADirectoryError,
            UnsupportedImageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except StegohashError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
