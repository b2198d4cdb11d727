import json

import numpy as np
import pytest

from stegohash.cli import main
from stegohash.experiments import generate_message
from stegohash.imagecore import RasterImage, load_png, save_png
from stegohash.testimages import pixel_digest, synthetic_lenna


@pytest.fixture(scope="module")
def image_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "lenna.png"
    save_png(synthetic_lenna(128), path)
    return path


def test_embed_extract_round_trip(image_file, tmp_path, capsys):
    out = tmp_path / "embedded.png"
    assert main(["embed", str(image_file), "--scheme", "iwt", "--seed", "42",
                 "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "psnr=" in printed
    sidecar = json.loads((tmp_path / "embedded.png.json").read_text())
    assert sidecar["scheme"] == "iwt"

    msg_file = tmp_path / "msg.bin"
    assert main(["extract", str(out), "--scheme", "iwt", "--out", str(msg_file)]) == 0
    assert msg_file.read_bytes() == generate_message(42, 10).to_bytes()


def test_extract_hex_stdout(image_file, tmp_path, capsys):
    out = tmp_path / "e.png"
    main(["embed", str(image_file), "--scheme", "dct-qim", "--out", str(out)])
    capsys.readouterr()
    assert main(["extract", str(out), "--scheme", "dct-qim"]) == 0
    hex_out = capsys.readouterr().out.strip()
    assert bytes.fromhex(hex_out) == generate_message(0, 10).to_bytes()


def test_metrics_identical(image_file, capsys):
    assert main(["metrics", str(image_file), str(image_file)]) == 0
    assert capsys.readouterr().out.strip() == "psnr=inf hamming=0.0"


def test_metrics_inverted_extremes_zero_db(tmp_path, capsys):
    black = tmp_path / "black.png"
    white = tmp_path / "white.png"
    save_png(RasterImage(np.zeros((3, 32, 32), dtype=np.uint8)), black)
    save_png(RasterImage(np.full((3, 32, 32), 255, dtype=np.uint8)), white)
    assert main(["metrics", str(black), str(white)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("psnr=0.0000")


def test_compress_writes_metadata(image_file, tmp_path, capsys):
    out = tmp_path / "c.png"
    assert main(["compress", str(image_file), "--algorithm", "dct", "--level", "0.2",
                 "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "c.png.json").read_text())
    assert meta["algorithm"] == "dct"
    assert meta["achieved_level"] == pytest.approx(13 / 64)


def test_missing_input_exits_3(tmp_path, capsys):
    assert main(["embed", str(tmp_path / "missing.png"), "--scheme", "iwt"]) == 3


def test_oversized_message_exits_2(image_file, tmp_path, capsys):
    big = tmp_path / "big.bin"
    big.write_bytes(bytes(23 * 300))  # 300 elements cannot fit any carrier here
    assert main(["embed", str(image_file), "--scheme", "qr-lsb",
                 "--message", str(big)]) == 2


def test_extract_from_clean_image_exits_2(image_file, capsys):
    assert main(["extract", str(image_file), "--scheme", "qr-lsb"]) == 2


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["embed", "x.png", "--scheme", "nope"])
    assert exc.value.code == 1


def test_invalid_level_exits_1(image_file, capsys):
    assert main(["compress", str(image_file), "--algorithm", "dct", "--level", "2.0"]) == 1


def test_experiment_command(tmp_path, image_file, capsys):
    out_dir = tmp_path / "results"
    config = tmp_path / "cfg.yaml"
    config.write_text(
        "n_repeats: 2\nrng_seed: 11\nschemes: [iwt, qr-lsb]\n"
        "compression_grid:\n  dct: [0.2]\n  spline: [3]\n"
    )
    code = main([
        "experiment", "both", "--images", str(image_file),
        "--out-dir", str(out_dir), "--config", str(config),
    ])
    assert code == 0
    man = (out_dir / "manipulation.csv").read_text()
    assert len(man.splitlines()) == 1 + 2 * 11  # header + 2 schemes x (k=0..10)
    comp = (out_dir / "compression.csv").read_text()
    assert len(comp.splitlines()) == 1 + 2
    assert (out_dir / "manipulation_aux.csv").exists()
    assert (out_dir / "config.json").exists()
    svgs = sorted(p.name for p in out_dir.glob("*.svg"))
    assert "manipulation_lenna_psnr_db.svg" in svgs
    assert "compression_lenna_hamming_mean.svg" in svgs
    for svg in svgs:
        assert "<svg" in (out_dir / svg).read_text()


def test_experiment_rerun_identical_csv(tmp_path, image_file, capsys):
    args_template = [
        "experiment", "manipulation", "--images", str(image_file),
        "--repeats", "2", "--seed", "3", "--schemes", "dwt-qim",
    ]
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert main(args_template + ["--out-dir", str(d1)]) == 0
    assert main(args_template + ["--out-dir", str(d2)]) == 0
    assert (d1 / "manipulation.csv").read_bytes() == (d2 / "manipulation.csv").read_bytes()


def test_fetch_synthetic_and_offline(tmp_path, capsys):
    out_dir = tmp_path / "imgs"
    assert main(["fetch-testimages", "--out-dir", str(out_dir), "--synthetic"]) == 0
    assert sorted(p.name for p in out_dir.glob("*.png")) == [
        "baboon.png", "lenna.png", "peppers.png",
    ]
    # offline mode accepts the pre-placed files when digests match
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "lenna": {"sha256_pixels": pixel_digest(load_png(out_dir / "lenna.png"))},
    }))
    assert main(["fetch-testimages", "--out-dir", str(out_dir), "--offline",
                 "--manifest", str(manifest)]) == 0


def test_fetch_tampered_digest_fails(tmp_path, capsys):
    out_dir = tmp_path / "imgs"
    main(["fetch-testimages", "--out-dir", str(out_dir), "--synthetic"])
    img = load_png(out_dir / "lenna.png")
    planes = img.planes.copy()
    planes[0, 0, 0] ^= 1
    save_png(RasterImage(planes), out_dir / "lenna.png")
    manifest = tmp_path / "manifest.json"
    from stegohash.testimages import SYNTHETIC_DIGESTS
    manifest.write_text(json.dumps({
        "lenna": {"sha256_pixels": SYNTHETIC_DIGESTS["lenna"]},
    }))
    assert main(["fetch-testimages", "--out-dir", str(out_dir), "--offline",
                 "--manifest", str(manifest)]) == 2


def test_fetch_offline_missing_file_fails(tmp_path, capsys):
    assert main(["fetch-testimages", "--out-dir", str(tmp_path / "empty"),
                 "--offline"]) == 2
