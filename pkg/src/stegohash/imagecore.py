"""8-bit raster images: PNG I/O, channel access, grayscale, safe rounding.

The in-memory layout is planar: ``planes`` has shape (channels, height,
width), dtype uint8. Interleaved data is converted at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .exceptions import UnsupportedImageError

# A single image plane: 2-D uint8 array, shape (height, width).
Channel = np.ndarray

# ITU-R BT.601 luma weights.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class RasterImage:
    """Multi-channel 8-bit image, planar layout (channels, height, width)."""

    planes: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.planes)
        if p.ndim != 3:
            raise ValueError(f"planes must be 3-D (c, h, w), got shape {p.shape}")
        if p.shape[0] not in (1, 3):
            raise ValueError(f"channel count must be 1 or 3, got {p.shape[0]}")
        if p.shape[1] < 1 or p.shape[2] < 1:
            raise ValueError("width and height must be positive")
        if p.dtype != np.uint8:
            raise ValueError(f"samples must be uint8, got {p.dtype}")
        object.__setattr__(self, "planes", p)

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.planes.shape == other.planes.shape and bool(
            np.array_equal(self.planes, other.planes)
        )


def from_planes(planes: np.ndarray) -> RasterImage:
    """Build a RasterImage from float or int planes, without rescaling.

    Values are clip-rounded into [0, 255]; shape must already be (c, h, w).
    """
    return RasterImage(clip_round(np.asarray(planes, dtype=np.float64)))


def load_png(path) -> RasterImage:
    """Load an 8-bit grayscale or RGB PNG.

    Anything that is not natively 8-bit gray or RGB (16-bit depth, palettes,
    alpha channels) is rejected rather than silently converted.
    """
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise UnsupportedImageError(f"cannot read {path}: {exc}") from exc
    if img.format != "PNG":
        raise UnsupportedImageError(f"{path}: not a PNG file (format={img.format})")
    if img.mode not in ("L", "RGB"):
        raise UnsupportedImageError(
            f"{path}: unsupported PNG mode {img.mode!r}; only 8-bit L and RGB are handled"
        )
    arr = np.asarray(img, dtype=np.uint8)
    if img.mode == "L":
        planes = arr[np.newaxis, :, :]
    else:
        planes = np.ascontiguousarray(arr.transpose(2, 0, 1))
    return RasterImage(planes)


def save_png(img: RasterImage, path) -> None:
    """Write a RasterImage as a lossless PNG."""
    if img.channels == 1:
        pil = Image.fromarray(img.planes[0], mode="L")
    else:
        pil = Image.fromarray(np.ascontiguousarray(img.planes.transpose(1, 2, 0)), mode="RGB")
    pil.save(path, format="PNG")


def split_channels(img: RasterImage) -> list[Channel]:
    """Return the image planes as a list of independent 2-D copies."""
    return [img.planes[c].copy() for c in range(img.channels)]


def merge_channels(channels: list[Channel]) -> RasterImage:
    """Inverse of split_channels."""
    if len(channels) not in (1, 3):
        raise ValueError(f"need 1 or 3 channels, got {len(channels)}")
    return RasterImage(np.stack([np.asarray(c, dtype=np.uint8) for c in channels]))


def to_grayscale(img: RasterImage) -> Channel:
    """BT.601 luminance as uint8; identity for single-channel input."""
    if img.channels == 1:
        return img.planes[0].copy()
    lum = np.tensordot(_LUMA_WEIGHTS, img.planes.astype(np.float64), axes=(0, 0))
    return clip_round(lum)


def clip_round(values) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255] uint8.

    Fixed repo-wide so that golden files are platform-independent.
    """
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite sample value")
    rounded = np.copysign(np.floor(np.abs(arr) + 0.5), arr)
    return np.clip(rounded, 0, 255).astype(np.uint8)
