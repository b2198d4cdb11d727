"""Deterministic 512x512 RGB stand-ins for the classic test images.

The three generators mimic the properties that drive every measurement in
this package: ``baboon`` is heavily textured with tightly clustered block
means, ``lenna`` mixes smooth structure with light texture, and ``peppers``
is dominated by large smooth regions of similar brightness. Redistribution
of the originals is murky, so experiments accept either user-supplied files
(verified against a manifest) or these synthetic scenes.

Digest pinning uses the decoded pixel array (sha256 over raw samples), which
is invariant under PNG re-encoding.
"""

from __future__ import annotations

import hashlib
import json
import urllib.request
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .exceptions import StegohashError
from .imagecore import RasterImage, load_png, save_png

SIZE = 512
NAMES = ("lenna", "baboon", "peppers")

# sha256 over planes.tobytes() of the synthetic images; frozen for tamper checks.
SYNTHETIC_DIGESTS = {
    "lenna": "2c6ae5e941ad47b6bc3f6c5f6bdca9173c86ddc48d784ed344af50d94a3032f3",
    "baboon": "a6a1a4e97bb02dcac6f4a65c598046eed8e1779dd1458b1e60521add0e6ab9ba",
    "peppers": "6dc1d0a2d73572f397e69164a16e6c4b187298f5e4edd135095c60a72b0680e9",
}


def _smooth_field(rng: np.random.Generator, size: int, cells: int, sigma: float) -> np.ndarray:
    """Random low-frequency field: coarse grid upsampled and blurred."""
    coarse = rng.normal(0.0, 1.0, size=(cells, cells))
    field = np.kron(coarse, np.ones((size // cells, size // cells)))
    field = gaussian_filter(field, sigma=sigma, mode="reflect")
    std = field.std()
    return field / (std if std > 0 else 1.0)


def _scale_block_means(field: np.ndarray, block: int, target_std: float) -> np.ndarray:
    """Rescale a zero-mean field so its block means have the target std."""
    b = field.reshape(field.shape[0] // block, block, field.shape[1] // block, block)
    std = b.mean(axis=(1, 3)).std()
    return field * (target_std / std if std > 0 else 0.0)


def _to_rgb(lum: np.ndarray, rng: np.random.Generator, tint: float) -> np.ndarray:
    planes = []
    for _ in range(3):
        offset = _smooth_field(rng, lum.shape[0], 8, sigma=24.0) * tint
        planes.append(lum + offset)
    return np.stack(planes)


def _block_mean_free(field: np.ndarray, block: int = 32) -> np.ndarray:
    """Remove each block's mean so the field cannot move hash-block means."""
    h, w = field.shape
    means = field.reshape(h // block, block, w // block, block).mean(axis=(1, 3))
    return field - np.kron(means, np.ones((block, block)))


def _open_median_gap(planes: np.ndarray, gap: float, push: float, block: int = 32) -> np.ndarray:
    """Nudge blocks whose luminance mean sits within +-gap of the median.

    The sub-gray per-block constant (added to all channels alike) is
    invisible but keeps tiny reconstruction wobbles from flipping hash bits
    on an otherwise very uniform image.
    """
    out = planes.copy()
    weights = np.array([0.299, 0.587, 0.114])
    for _ in range(2):
        lum = np.tensordot(weights, out, axes=(0, 0))
        h, w = lum.shape
        means = lum.reshape(h // block, block, w // block, block).mean(axis=(1, 3))
        med = np.median(means)
        delta = np.zeros_like(means)
        near = np.abs(means - med) < gap
        delta[near] = np.where(means[near] >= med, push, -push) - (means[near] - med)
        out = out + np.kron(delta, np.ones((block, block)))[np.newaxis, :, :]
    return out


def _concentrate_means(planes: np.ndarray, band: float, factor: float,
                       block: int = 32) -> np.ndarray:
    """Pull block luminance means within +-band of the median closer by factor.

    Per-block constants of a couple of gray levels are invisible; the result
    is a dense core of near-median block means, the property that makes very
    uniform scenes hypersensitive to mean wobble.
    """
    weights = np.array([0.299, 0.587, 0.114])
    lum = np.tensordot(weights, planes, axes=(0, 0))
    h, w = lum.shape
    means = lum.reshape(h // block, block, w // block, block).mean(axis=(1, 3))
    med = np.median(means)
    delta = np.zeros_like(means)
    near = np.abs(means - med) < band
    delta[near] = (factor - 1.0) * (means[near] - med)
    return planes + np.kron(delta, np.ones((block, block)))[np.newaxis, :, :]


def _finalize(planes: np.ndarray, lo: int = 16, hi: int = 240) -> RasterImage:
    return RasterImage(np.clip(np.round(planes), lo, hi).astype(np.uint8))


def synthetic_lenna(size: int = SIZE) -> RasterImage:
    """Smooth portrait-like structure with light texture."""
    rng = np.random.default_rng(0x1E44A)
    structure = _scale_block_means(_smooth_field(rng, size, 32, sigma=10.0), 32, 1.45)
    detail = gaussian_filter(rng.normal(0.0, 1.0, (size, size)), 1.2)
    detail *= 5.0 / detail.std()
    lum = 128.0 + structure + detail
    return _finalize(_to_rgb(lum, rng, tint=6.0))


def synthetic_baboon(size: int = SIZE) -> RasterImage:
    """Heavy broadband texture over a nearly flat background.

    A small gap in the block-mean distribution around its median keeps
    high-quality compressors from flipping hash bits by numerical wobble,
    while embedding-scale perturbations jump it easily.
    """
    rng = np.random.default_rng(0xBAB00)
    structure = _scale_block_means(_smooth_field(rng, size, 32, sigma=10.0), 32, 1.1)
    texture = rng.normal(0.0, 1.0, (size, size))
    texture *= 30.0 / texture.std()
    planes = _to_rgb(128.0 + structure + _block_mean_free(texture), rng, tint=5.0)
    return _finalize(_open_median_gap(planes, gap=0.12, push=0.15))


def synthetic_peppers(size: int = SIZE) -> RasterImage:
    """Overlapping blobs, most of them at nearly the same brightness.

    The tight brightness cluster packs many hash-block means close to the
    median, and the moderately sharp boundaries leave every compressor some
    edge error to wobble them with.
    """
    rng = np.random.default_rng(0x9E99E5)
    yy, xx = np.indices((size, size), dtype=np.float64)
    lum = np.full((size, size), 119.0)
    for i in range(150):
        cy, cx = rng.uniform(0, size, 2)
        ry, rx = rng.uniform(18, 45, 2)
        angle = rng.uniform(0, np.pi)
        dy, dx = yy - cy, xx - cx
        u = dy * np.cos(angle) + dx * np.sin(angle)
        v = -dy * np.sin(angle) + dx * np.cos(angle)
        inside = (u / ry) ** 2 + (v / rx) ** 2 <= 1.0
        if rng.uniform() < 0.66:
            lum[inside] = 119.0 + rng.uniform(-1.4, 1.4)
        else:
            lum[inside] = 119.0 + rng.uniform(-30, 30)
    lum = gaussian_filter(lum, sigma=1.1)
    shading = _smooth_field(rng, size, 8, sigma=40.0) * 1.1
    lowfreq = gaussian_filter(rng.normal(0.0, 1.0, (size, size)), 2.2)
    lowfreq *= 9.0 / lowfreq.std()
    speckle = gaussian_filter(rng.normal(0.0, 1.0, (size, size)), 0.8)
    speckle *= 2.0 / speckle.std()
    lum = lum + shading + _block_mean_free(lowfreq + speckle)
    planes = _concentrate_means(_to_rgb(lum, rng, tint=4.0), band=3.0, factor=0.35)
    return _finalize(planes)


_GENERATORS = {
    "lenna": synthetic_lenna,
    "baboon": synthetic_baboon,
    "peppers": synthetic_peppers,
}


def synthetic_image(name: str) -> RasterImage:
    try:
        return _GENERATORS[name]()
    except KeyError:
        raise ValueError(f"unknown test image {name!r}; expected one of {NAMES}") from None


def pixel_digest(img: RasterImage) -> str:
    return hashlib.sha256(img.planes.tobytes()).hexdigest()


def load_manifest(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def fetch_testimages(out_dir, manifest: dict | None = None, offline: bool = False,
                     synthetic: bool = False) -> dict[str, Path]:
    """Materialize the three test images in out_dir and verify digests.

    * synthetic: write the deterministic stand-ins (digest-pinned in-package).
    * offline: accept pre-placed PNG files, verifying manifest digests if any.
    * otherwise: download each manifest URL and verify its pinned digest.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved: dict[str, Path] = {}

    if synthetic:
        for name in NAMES:
            img = synthetic_image(name)
            digest = pixel_digest(img)
            expected = SYNTHETIC_DIGESTS.get(name)
            if expected and digest != expected:
                raise StegohashError(f"synthetic {name}: digest mismatch ({digest})")
            path = out_dir / f"{name}.png"
            save_png(img, path)
            resolved[name] = path
        return resolved

    entries = manifest or {name: {} for name in NAMES}
    for name, entry in entries.items():
        path = out_dir / f"{name}.png"
        if offline:
            if not path.exists():
                raise StegohashError(f"offline mode: {path} is missing")
        else:
            urls = entry.get("urls", [])
            if not urls:
                raise StegohashError(f"{name}: no download URL in manifest")
            last_err = None
            for url in urls:
                try:
                    with urllib.request.urlopen(url, timeout=30) as resp:
                        path.write_bytes(resp.read())
                    last_err = None
                    break
                except Exception as exc:  # noqa: BLE001 - propagate last failure below
                    last_err = exc
            if last_err is not None:
                raise StegohashError(f"{name}: all downloads failed ({last_err})")
        img = load_png(path)
        expected = entry.get("sha256_pixels")
        if expected:
            digest = pixel_digest(img)
            if digest != expected:
                raise StegohashError(
                    f"{name}: pixel digest {digest} does not match pinned {expected}"
                )
        resolved[name] = path
    return resolved
