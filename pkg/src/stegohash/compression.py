"""Five deterministic lossy-compression simulators.

Each returns the reconstructed image together with the achieved storage
fraction. Storage is counted as retained coefficients/samples (plus an
explicit structure-bit model for the quadtree), not an entropy-coded byte
count, so the reported levels are exact and auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .imagecore import RasterImage, clip_round, merge_channels, split_channels
from .transforms import block_view, dct2_blocks, haar_dwt, idct2_blocks, ihaar_dwt, unblock_view, WaveletBands

ALGORITHMS = ("dct", "dwt", "klt", "quadtree", "spline")


@dataclass(frozen=True)
class CompressionResult:
    image: RasterImage
    level: float  # achieved fraction of original storage, in (0, 1]
    algorithm: str
    params: dict


def _zigzag_order(n: int = 8) -> list[tuple[int, int]]:
    order = []
    for s in range(2 * n - 1):
        rs = range(min(s, n - 1), max(0, s - n + 1) - 1, -1)
        cells = [(r, s - r) for r in rs]  # r descending
        order.extend(list(reversed(cells)) if s % 2 else cells)
    return order


_ZIGZAG = _zigzag_order()


def compress_dct(img: RasterImage, level: float) -> CompressionResult:
    """Zonal truncation: keep the first round(level*64) zig-zag coefficients."""
    if not 0.0 < level <= 1.0:
        raise ValueError(f"level must be in (0, 1], got {level}")
    if img.height % 8 or img.width % 8:
        raise ValueError("dimensions must be divisible by 8")
    k = max(1, round(level * 64))
    keep = np.zeros((8, 8), dtype=bool)
    for r, c in _ZIGZAG[:k]:
        keep[r, c] = True
    out = []
    for channel in split_channels(img):
        coefs = dct2_blocks(block_view(channel.astype(np.float64)))
        coefs[:, :, ~keep] = 0.0
        out.append(clip_round(unblock_view(idct2_blocks(coefs))))
    return CompressionResult(
        image=merge_channels(out), level=k / 64.0, algorithm="dct", params={"kept": k}
    )


def compress_dwt(img: RasterImage, levels: int) -> CompressionResult:
    """Keep only the LL band through `levels` Haar stages (25%, 6.25%, 1.5%)."""
    if levels not in (1, 2, 3):
        raise ValueError(f"levels must be 1, 2 or 3, got {levels}")
    if img.height % (1 << levels) or img.width % (1 << levels):
        raise ValueError(f"dimensions must be divisible by {1 << levels}")
    out = []
    for channel in split_channels(img):
        ll = channel.astype(np.float64)
        for _ in range(levels):
            ll = haar_dwt(ll).ll
        for _ in range(levels):
            zero = np.zeros_like(ll)
            ll = ihaar_dwt(WaveletBands(ll=ll, lh=zero, hl=zero, hh=zero))
        out.append(clip_round(ll))
    return CompressionResult(
        image=merge_channels(out), level=4.0 ** (-levels), algorithm="dwt",
        params={"levels": levels},
    )


def klt_reconstruct_channel(channel: np.ndarray, kept: int) -> np.ndarray:
    """Float KLT reconstruction of one channel from the top-k eigenvectors.

    The basis comes from the eigendecomposition of this channel's own 8x8
    block covariance; eigenvector signs are fixed (largest-magnitude
    component positive) for reproducibility.
    """
    blocks = block_view(channel.astype(np.float64))
    nbh, nbw = blocks.shape[:2]
    x = blocks.reshape(nbh * nbw, 64)
    mu = x.mean(axis=0)
    xc = x - mu
    cov = xc.T @ xc / x.shape[0]
    if not np.any(np.abs(cov) > 1e-12):
        recon = np.tile(mu, (x.shape[0], 1))
    else:
        _, vecs = np.linalg.eigh(cov)
        top = vecs[:, ::-1][:, :kept]
        signs = np.sign(top[np.argmax(np.abs(top), axis=0), np.arange(kept)])
        signs[signs == 0] = 1.0
        top = top * signs
        recon = (xc @ top) @ top.T + mu
    return unblock_view(recon.reshape(nbh, nbw, 8, 8))


def compress_klt(img: RasterImage, kept_eigenvectors: int) -> CompressionResult:
    if not 1 <= kept_eigenvectors <= 64:
        raise ValueError(f"kept_eigenvectors must be in [1, 64], got {kept_eigenvectors}")
    if img.height % 8 or img.width % 8:
        raise ValueError("dimensions must be divisible by 8")
    out = [
        clip_round(klt_reconstruct_channel(ch, kept_eigenvectors))
        for ch in split_channels(img)
    ]
    return CompressionResult(
        image=merge_channels(out), level=kept_eigenvectors / 64.0, algorithm="klt",
        params={"kept": kept_eigenvectors},
    )


def compress_quadtree(img: RasterImage, max_depth: int,
                      split_threshold: float = 10.0) -> CompressionResult:
    """Split while the node's intensity range exceeds the threshold.

    Leaves render as their pixel mean. Storage: 1 byte per leaf plus 1
    structure bit per node.
    """
    if not 3 <= max_depth <= 8:
        raise ValueError(f"max_depth must be in [3, 8], got {max_depth}")
    side = img.height
    if img.width != side or side & (side - 1):
        raise ValueError("square power-of-two dimensions required")
    if side >> max_depth < 1:
        raise ValueError(f"max_depth {max_depth} gives sub-pixel leaves for side {side}")

    total_bits = 0
    out = []
    for channel in split_channels(img):
        ch = channel.astype(np.float64)
        # Per-depth pyramids of block min/max/mean.
        mins, maxs, means = [], [], []
        for d in range(max_depth + 1):
            blocks = ch.reshape(1 << d, side >> d, 1 << d, side >> d)
            mins.append(blocks.min(axis=(1, 3)))
            maxs.append(blocks.max(axis=(1, 3)))
            means.append(blocks.mean(axis=(1, 3)))

        recon = np.empty_like(ch)
        leaves = 0
        nodes = 0
        stack = [(0, 0, 0)]
        while stack:
            d, i, j = stack.pop()
            nodes += 1
            size = side >> d
            if d < max_depth and size > 1 and maxs[d][i, j] - mins[d][i, j] > split_threshold:
                stack.extend(((d + 1, 2 * i, 2 * j), (d + 1, 2 * i, 2 * j + 1),
                              (d + 1, 2 * i + 1, 2 * j), (d + 1, 2 * i + 1, 2 * j + 1)))
            else:
                leaves += 1
                recon[i * size:(i + 1) * size, j * size:(j + 1) * size] = means[d][i, j]
        total_bits += leaves * 8 + nodes
        out.append(clip_round(recon))

    level = total_bits / (img.planes.size * 8)
    return CompressionResult(
        image=merge_channels(out), level=level, algorithm="quadtree",
        params={"max_depth": max_depth, "split_threshold": split_threshold},
    )


def compress_spline(img: RasterImage, keep_every: int) -> CompressionResult:
    """Subsample every n-th row/column and rebuild by bicubic interpolation."""
    if not 2 <= keep_every <= 7:
        raise ValueError(f"keep_every must be in [2, 7], got {keep_every}")
    out = []
    for channel in split_channels(img):
        h, w = channel.shape
        # first row/col of every stride, plus the far border so the spline
        # domain spans the whole image (the FITPACK surface clamps outside
        # its knot range instead of extrapolating)
        rows = np.unique(np.append(np.arange(0, h, keep_every), h - 1))
        cols = np.unique(np.append(np.arange(0, w, keep_every), w - 1))
        spline = RectBivariateSpline(
            rows, cols, channel[np.ix_(rows, cols)].astype(np.float64), kx=3, ky=3
        )
        out.append(clip_round(spline(np.arange(h), np.arange(w))))
    return CompressionResult(
        image=merge_channels(out), level=1.0 / keep_every**2, algorithm="spline",
        params={"keep_every": keep_every},
    )


def compress(img: RasterImage, algorithm: str, param) -> CompressionResult:
    """Dispatch by algorithm name with its natural parameter."""
    if algorithm == "dct":
        return compress_dct(img, float(param))
    if algorithm == "dwt":
        return compress_dwt(img, int(param))
    if algorithm == "klt":
        return compress_klt(img, int(param))
    if algorithm == "quadtree":
        return compress_quadtree(img, int(param))
    if algorithm == "spline":
        return compress_spline(img, int(param))
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
