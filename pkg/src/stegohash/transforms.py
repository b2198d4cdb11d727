"""Block and wavelet transforms: 8x8 DCT, single-level Haar DWT, integer Haar.

Conventions fixed here and relied on everywhere else:

* DCT is the orthonormal type-II transform (Parseval holds per block).
* The Haar DWT uses the averaging normalization: the LL band of a constant
  image equals that constant, so LL values stay in pixel range.
* The integer transform pairs adjacent rows first, then adjacent columns.
  Lowpass is ``floor((x0 + x1) / 2)``, highpass is ``x0 - x1``; the lifting
  inverse ``x0 = h + floor((g + 1) / 2)`` is exact for all integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

BLOCK = 8


@dataclass(frozen=True)
class WaveletBands:
    """Single-level 2-D Haar decomposition (vertical x horizontal)."""

    ll: np.ndarray  # low/low
    lh: np.ndarray  # vertical low, horizontal high
    hl: np.ndarray  # vertical high, horizontal low
    hh: np.ndarray  # high/high
    levels: int = 1


@dataclass(frozen=True)
class IntegerBands:
    """Integer Haar bands; same band layout as WaveletBands, integer dtype."""

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray


def dct2_block(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D type-II DCT of one 8x8 block."""
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (BLOCK, BLOCK):
        raise ValueError(f"expected {BLOCK}x{BLOCK} block, got {block.shape}")
    return _fft.dctn(block, type=2, norm="ortho")


def idct2_block(coefs: np.ndarray) -> np.ndarray:
    """Inverse of dct2_block."""
    coefs = np.asarray(coefs, dtype=np.float64)
    if coefs.shape != (BLOCK, BLOCK):
        raise ValueError(f"expected {BLOCK}x{BLOCK} block, got {coefs.shape}")
    return _fft.idctn(coefs, type=2, norm="ortho")


def dct2_blocks(blocks: np.ndarray) -> np.ndarray:
    """Vectorized dct2_block over a (..., 8, 8) stack."""
    return _fft.dctn(np.asarray(blocks, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def idct2_blocks(coefs: np.ndarray) -> np.ndarray:
    """Vectorized idct2_block over a (..., 8, 8) stack."""
    return _fft.idctn(np.asarray(coefs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def block_view(channel: np.ndarray, size: int = BLOCK) -> np.ndarray:
    """Reshape (h, w) into a (h//size, w//size, size, size) block stack."""
    h, w = channel.shape
    if h % size or w % size:
        raise ValueError(f"dimensions {h}x{w} not divisible by {size}")
    return channel.reshape(h // size, size, w // size, size).swapaxes(1, 2)


def unblock_view(blocks: np.ndarray) -> np.ndarray:
    """Inverse of block_view."""
    nbh, nbw, size, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(nbh * size, nbw * size)


def _require_even(shape) -> None:
    if shape[0] % 2 or shape[1] % 2:
        raise ValueError(f"even dimensions required, got {shape[0]}x{shape[1]}")


def haar_dwt(channel: np.ndarray) -> WaveletBands:
    """Single-level separable Haar decomposition, averaging form."""
    x = np.asarray(channel, dtype=np.float64)
    _require_even(x.shape)
    lo_v = (x[0::2, :] + x[1::2, :]) / 2.0
    hi_v = (x[0::2, :] - x[1::2, :]) / 2.0
    ll = (lo_v[:, 0::2] + lo_v[:, 1::2]) / 2.0
    lh = (lo_v[:, 0::2] - lo_v[:, 1::2]) / 2.0
    hl = (hi_v[:, 0::2] + hi_v[:, 1::2]) / 2.0
    hh = (hi_v[:, 0::2] - hi_v[:, 1::2]) / 2.0
    return WaveletBands(ll=ll, lh=lh, hl=hl, hh=hh)


def ihaar_dwt(bands: WaveletBands) -> np.ndarray:
    """Exact synthesis inverse of haar_dwt (in real arithmetic)."""
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in (bands.ll, bands.lh, bands.hl, bands.hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise ValueError("inconsistent band shapes")
    hb, wb = ll.shape
    lo_v = np.empty((hb, 2 * wb))
    hi_v = np.empty((hb, 2 * wb))
    lo_v[:, 0::2] = ll + lh
    lo_v[:, 1::2] = ll - lh
    hi_v[:, 0::2] = hl + hh
    hi_v[:, 1::2] = hl - hh
    out = np.empty((2 * hb, 2 * wb))
    out[0::2, :] = lo_v + hi_v
    out[1::2, :] = lo_v - hi_v
    return out


def haar_lift(x0, x1):
    """Integer Haar analysis of one sample pair: (lowpass, highpass)."""
    x0 = np.asarray(x0, dtype=np.int64)
    x1 = np.asarray(x1, dtype=np.int64)
    return (x0 + x1) // 2, x0 - x1


def haar_unlift(h, g):
    """Exact integer inverse of haar_lift."""
    h = np.asarray(h, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    x0 = h + (g + 1) // 2
    return x0, x0 - g


def iwt_forward(channel: np.ndarray) -> IntegerBands:
    """2-D integer Haar transform: rows paired first, then columns."""
    x = np.asarray(channel)
    if not np.issubdtype(x.dtype, np.integer):
        raise ValueError(f"integer samples required, got dtype {x.dtype}")
    _require_even(x.shape)
    x = x.astype(np.int64)
    lo_v, hi_v = haar_lift(x[0::2, :], x[1::2, :])
    ll, lh = haar_lift(lo_v[:, 0::2], lo_v[:, 1::2])
    hl, hh = haar_lift(hi_v[:, 0::2], hi_v[:, 1::2])
    return IntegerBands(ll=ll, lh=lh, hl=hl, hh=hh)


def iwt_inverse(bands: IntegerBands) -> np.ndarray:
    """Exact integer inverse of iwt_forward (columns first, then rows)."""
    ll, lh, hl, hh = (np.asarray(b, dtype=np.int64) for b in (bands.ll, bands.lh, bands.hl, bands.hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise ValueError("inconsistent band shapes")
    hb, wb = ll.shape
    lo_v = np.empty((hb, 2 * wb), dtype=np.int64)
    hi_v = np.empty((hb, 2 * wb), dtype=np.int64)
    lo_v[:, 0::2], lo_v[:, 1::2] = haar_unlift(ll, lh)
    hi_v[:, 0::2], hi_v[:, 1::2] = haar_unlift(hl, hh)
    out = np.empty((2 * hb, 2 * wb), dtype=np.int64)
    out[0::2, :], out[1::2, :] = haar_unlift(lo_v, hi_v)
    return out
