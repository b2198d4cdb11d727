"""Block-mean robust hash plus the two comparison metrics (PSNR, Hamming)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecore import RasterImage, to_grayscale

DEFAULT_GRID = (16, 16)


@dataclass(frozen=True)
class RobustHash:
    """Bit-per-block hash: 1 where the block mean is >= the median mean."""

    bits: tuple[int, ...]
    grid: tuple[int, int]
    block_size: int

    def __post_init__(self):
        rows, cols = self.grid
        if len(self.bits) != rows * cols:
            raise ValueError("bit count must equal rows*cols")

    def to_hex(self) -> str:
        """Lowercase hex; MSB of the first byte is the first block (row-major)."""
        n = len(self.bits)
        padded = list(self.bits) + [0] * (-n % 8)
        value = 0
        for b in padded:
            value = (value << 1) | b
        return format(value, f"0{len(padded) // 4}x")


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float  # may be math.inf for identical images
    hamming: float


def block_hash(img: RasterImage, grid: tuple[int, int] = DEFAULT_GRID) -> RobustHash:
    """Hash the luminance by comparing per-block means against their median.

    Ties (mean == median) map to 1. The grid must divide the image exactly.
    """
    rows, cols = grid
    lum = to_grayscale(img)
    h, w = lum.shape
    if h % rows or w % cols:
        raise ValueError(f"grid {rows}x{cols} does not divide image {h}x{w}")
    bh, bw = h // rows, w // cols
    means = lum.reshape(rows, bh, cols, bw).mean(axis=(1, 3), dtype=np.float64)
    median = float(np.median(means))
    bits = tuple(int(v) for v in (means >= median).astype(np.uint8).ravel())
    return RobustHash(bits=bits, grid=grid, block_size=min(bh, bw))


def psnr(a: RasterImage, b: RasterImage) -> float:
    """Peak signal-to-noise ratio in dB over all samples of all channels.

    Identical images give +inf. The denominator is the raw squared-error sum,
    with N = width*height*channels in the numerator.
    """
    if a.planes.shape != b.planes.shape:
        raise ValueError(f"shape mismatch: {a.planes.shape} vs {b.planes.shape}")
    diff = a.planes.astype(np.int64) - b.planes.astype(np.int64)
    sq = float(np.sum(diff * diff))
    if sq == 0.0:
        return float("inf")
    n = a.planes.size
    return float(10.0 * np.log10(n * 255.0**2 / sq))


def hamming_distance(h1: RobustHash, h2: RobustHash) -> float:
    """Fraction of differing bit positions, in [0, 1]."""
    if len(h1.bits) != len(h2.bits):
        raise ValueError(f"hash length mismatch: {len(h1.bits)} vs {len(h2.bits)}")
    differing = sum(x != y for x, y in zip(h1.bits, h2.bits))
    return differing / len(h1.bits)
