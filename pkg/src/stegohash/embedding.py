"""The four message embedders and their extractors.

Schemes
-------
* ``qr-lsb``  - message thirds rendered as QR symbols, one per RGB channel,
  written into the low bits of every pixel (the area outside the symbol is
  written as light modules, which doubles as the quiet zone).
* ``iwt``     - same QR rendering, but into the low bits of the LL band of
  the integer Haar transform; the inverse transform is exact on integers.
* ``dct-qim`` - QIM modulation of the 15 lowest-frequency AC coefficients
  (4x4 corner minus DC) of every 8x8 DCT block.
* ``dwt-qim`` - QIM modulation of every Haar LL coefficient. The quantizer
  acts on the sum-normalized band (2x the stored average-normalized LL), so
  the configured step sizes control pixel-scale noise directly.

Message bits are tiled cyclically over the full carrier capacity; extraction
majority-votes each bit position over its repetitions. Placement geometry is
recomputed from the image dimensions and the fixed protocol parameters, so
extraction needs no side-channel data.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import CapacityError, ExtractionError, PlacementError
from .imagecore import RasterImage, clip_round, merge_channels, split_channels
from .perceptual import psnr
from .qr import decode_qr, encode_qr, side_length, version_for
from .transforms import (
    block_view,
    dct2_blocks,
    haar_dwt,
    idct2_blocks,
    ihaar_dwt,
    iwt_forward,
    iwt_inverse,
    unblock_view,
    WaveletBands,
    IntegerBands,
)

ELEMENT_BYTES = 23  # 16-byte hash + 7-byte timestamp
SCHEMES = ("qr-lsb", "iwt", "dct-qim", "dwt-qim")

# Raster order over the 4x4 low-frequency DCT corner, DC excluded.
_DCT_SLOTS = tuple((r, c) for r in range(4) for c in range(4) if (r, c) != (0, 0))


@dataclass(frozen=True)
class Message:
    """Fixed-size payload: n elements of 16-byte hash + 7-byte timestamp."""

    elements: tuple[bytes, ...]

    def __post_init__(self):
        for el in self.elements:
            if len(el) != ELEMENT_BYTES:
                raise ValueError(f"element must be {ELEMENT_BYTES} bytes, got {len(el)}")

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def to_bytes(self) -> bytes:
        return b"".join(self.elements)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Message":
        if len(data) % ELEMENT_BYTES:
            raise ValueError(f"length {len(data)} is not a multiple of {ELEMENT_BYTES}")
        n = len(data) // ELEMENT_BYTES
        return cls(tuple(data[i * ELEMENT_BYTES:(i + 1) * ELEMENT_BYTES] for i in range(n)))


@dataclass(frozen=True)
class EmbedderConfig:
    scheme: str = "qr-lsb"
    lsb_depth: int = 3
    qs_dct: float = 23.0
    qs_dwt: float = 21.0
    dct_block: int = 8
    dct_region: int = 4
    qr_ecc_level: str = "M"
    # Fixed mask keeps re-encodings of related payloads comparable; None
    # selects the mask by penalty score.
    qr_mask: int | None = 0
    n_elements: int = 10
    hash_grid: int = 16

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not 1 <= self.lsb_depth <= 7:
            raise ValueError("lsb_depth must be in [1, 7]")
        if self.qs_dct <= 0 or self.qs_dwt <= 0:
            raise ValueError("quantizers must be positive")


@dataclass(frozen=True)
class QrPlacement:
    b_qr: int
    qr_size: int
    corners: tuple[str, str, str] = ("top-left", "top-right", "bottom-left")


# --------------------------------------------------------------------------
# QIM (coefficient-lattice modulation)
# --------------------------------------------------------------------------


def qim_embed(x, m, q_s):
    """Snap x to the nearest quantizer lattice point, offset +-q_s/4 by bit m.

    The lattice index is the nearest integer to x/q_s (half away from zero),
    which bounds the displacement by 3*q_s/4 for every input.
    """
    if q_s <= 0:
        raise ValueError("q_s must be positive")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite coefficient")
    m = np.asarray(m)
    base = np.copysign(np.floor(np.abs(x) / q_s + 0.5), x) * q_s
    offset = np.where(m == 1, q_s / 4.0, -q_s / 4.0)
    out = base + offset
    return out if out.ndim else float(out)


def qim_extract(x, q_s):
    """Decode the embedded bit: 1 iff x lies nearer the +q_s/4 sub-lattice.

    Exact midpoints (residue 0 or q_s/2) decode to 0.
    """
    if q_s <= 0:
        raise ValueError("q_s must be positive")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite coefficient")
    residue = np.mod(x, q_s)
    bit = ((residue > 0) & (residue < q_s / 2.0)).astype(np.uint8)
    return bit if bit.ndim else int(bit)


# --------------------------------------------------------------------------
# Message <-> channel payloads
# --------------------------------------------------------------------------


def padded_length(n_elements: int) -> int:
    total = n_elements * ELEMENT_BYTES
    return total + (-total) % 3


def third_length(n_elements: int) -> int:
    """Bytes per channel payload: a 1-byte pad header plus a padded third."""
    return padded_length(n_elements) // 3 + 1


def split_message(msg: Message) -> list[bytes]:
    """Serialize and split into 3 equal channel payloads with pad headers."""
    raw = msg.to_bytes()
    pad = (-len(raw)) % 3
    padded = raw + b"\x00" * pad
    third = len(padded) // 3
    return [bytes([pad]) + padded[i * third:(i + 1) * third] for i in range(3)]


def join_thirds(payloads: list[bytes], n_elements: int, strict: bool = True) -> Message:
    """Rebuild a Message from 3 channel payloads.

    With ``strict`` the pad headers must match the protocol value; without
    it malformed headers are ignored and the expected geometry is used
    (extraction from garbage then simply yields a garbage message).
    """
    expected_pad = (-n_elements * ELEMENT_BYTES) % 3
    expected_len = third_length(n_elements)
    chunks = []
    for payload in payloads:
        if len(payload) != expected_len:
            if strict:
                raise ExtractionError(
                    f"channel payload is {len(payload)} bytes, expected {expected_len}"
                )
            payload = (payload + b"\x00" * expected_len)[:expected_len]
        if strict and payload[0] != expected_pad:
            raise ExtractionError(f"pad header {payload[0]} != expected {expected_pad}")
        chunks.append(payload[1:])
    data = b"".join(chunks)[:n_elements * ELEMENT_BYTES]
    return Message.from_bytes(data)


def _payload_bits(payload: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8))


def _bits_to_payload(bits: np.ndarray) -> bytes:
    return np.packbits(bits.astype(np.uint8)).tobytes()


def _tile_bits(bits: np.ndarray, n_slots: int) -> np.ndarray:
    if n_slots < bits.size:
        raise CapacityError(f"carrier offers {n_slots} bit slots, message needs {bits.size}")
    reps = int(np.ceil(n_slots / bits.size))
    return np.tile(bits, reps)[:n_slots]


def _vote_bits(slot_bits: np.ndarray, n_bits: int) -> np.ndarray:
    """Majority vote per bit position over the tiled repetitions; ties -> 0."""
    n_slots = slot_bits.size
    ones = np.zeros(n_bits, dtype=np.int64)
    totals = np.zeros(n_bits, dtype=np.int64)
    positions = np.arange(n_slots) % n_bits
    np.add.at(ones, positions, slot_bits.astype(np.int64))
    np.add.at(totals, positions, 1)
    return (2 * ones > totals).astype(np.uint8)


# --------------------------------------------------------------------------
# QR canvas placement
# --------------------------------------------------------------------------


def choose_qr_scale(qr_size: int, image_dim: int, b_hash: int) -> QrPlacement:
    """Largest module size of the form n^i * b_hash (i in {-1,0,1}) that fits.

    Keeping QR modules and hash blocks integer multiples of each other makes
    a flipped module perturb as few hash blocks as possible.
    """
    candidates = {b_hash}
    for n in range(1, b_hash + 1):
        if b_hash % n == 0:
            candidates.add(b_hash // n)
        if n * b_hash <= image_dim:
            candidates.add(n * b_hash)
    feasible = [b for b in sorted(candidates, reverse=True) if b >= 1 and b * qr_size <= image_dim]
    if not feasible:
        raise PlacementError(
            f"QR of {qr_size} modules cannot fit a {image_dim}px dimension at any scale"
        )
    return QrPlacement(b_qr=feasible[0], qr_size=qr_size)


def _corner_origin(corner: str, height: int, width: int, span: int) -> tuple[int, int]:
    if corner == "top-left":
        return 0, 0
    if corner == "top-right":
        return 0, width - span
    if corner == "bottom-left":
        return height - span, 0
    raise ValueError(f"unknown corner {corner!r}")


def _placement_for(cfg: EmbedderConfig, carrier_h: int, carrier_w: int) -> QrPlacement:
    payload_len = third_length(cfg.n_elements)
    version = version_for(payload_len, cfg.qr_ecc_level)
    dim = min(carrier_h, carrier_w)
    b_hash = max(dim // cfg.hash_grid, 1)
    return choose_qr_scale(side_length(version), dim, b_hash)


def _qr_bit_canvas(payload: bytes, cfg: EmbedderConfig, placement: QrPlacement,
                   corner: str, height: int, width: int) -> np.ndarray:
    """Boolean canvas, True where the carrier low bits become dark (zero)."""
    sym = encode_qr(payload, ecc=cfg.qr_ecc_level, mask=cfg.qr_mask)
    if sym.size != placement.qr_size:
        raise PlacementError(
            f"payload produced a {sym.size}-module symbol, placement expects {placement.qr_size}"
        )
    canvas = np.zeros((height, width), dtype=bool)
    scaled = np.kron(sym.matrix, np.ones((placement.b_qr, placement.b_qr), dtype=bool))
    span = placement.b_qr * placement.qr_size
    r0, c0 = _corner_origin(corner, height, width, span)
    canvas[r0:r0 + span, c0:c0 + span] = scaled
    return canvas


def _read_qr_canvas(values: np.ndarray, depth: int, placement: QrPlacement,
                    corner: str) -> np.ndarray:
    """Majority-vote each module's low-bit region back to a module grid."""
    mask = (1 << depth) - 1
    height, width = values.shape
    span = placement.b_qr * placement.qr_size
    r0, c0 = _corner_origin(corner, height, width, span)
    region = (values[r0:r0 + span, c0:c0 + span] & mask).astype(np.int64)
    b = placement.b_qr
    sums = region.reshape(placement.qr_size, b, placement.qr_size, b).sum(axis=(1, 3))
    # Dark modules carry all-zero low bits: below half-scale means dark.
    return sums * 2 < mask * b * b


# --------------------------------------------------------------------------
# Scheme: QR in spatial LSB
# --------------------------------------------------------------------------


def _require_rgb(img: RasterImage) -> None:
    if img.channels != 3:
        raise ValueError("embedding requires an RGB image (message splits into 3 parts)")


def embed_qr_lsb(img: RasterImage, msg: Message, cfg: EmbedderConfig) -> RasterImage:
    _require_rgb(img)
    placement = _placement_for(cfg, img.height, img.width)
    payloads = split_message(msg)
    mask = (1 << cfg.lsb_depth) - 1
    out = []
    for channel, payload, corner in zip(split_channels(img), payloads, placement.corners):
        dark = _qr_bit_canvas(payload, cfg, placement, corner, img.height, img.width)
        cleared = channel & np.uint8(0xFF ^ mask)
        out.append(np.where(dark, cleared, cleared | np.uint8(mask)))
    return merge_channels(out)


def extract_qr_lsb(img: RasterImage, cfg: EmbedderConfig,
                   placement: QrPlacement | None = None) -> Message:
    _require_rgb(img)
    if placement is None:
        placement = _placement_for(cfg, img.height, img.width)
    payloads = []
    for channel, corner in zip(split_channels(img), placement.corners):
        grid = _read_qr_canvas(channel, cfg.lsb_depth, placement, corner)
        payloads.append(decode_qr(grid))
    return join_thirds(payloads, cfg.n_elements, strict=True)


# --------------------------------------------------------------------------
# Scheme: QR in the LL band of the integer wavelet transform
# --------------------------------------------------------------------------


def embed_iwt(img: RasterImage, msg: Message, cfg: EmbedderConfig) -> RasterImage:
    _require_rgb(img)
    if img.height % 2 or img.width % 2:
        raise ValueError("even dimensions required for the integer transform")
    placement = _placement_for(cfg, img.height // 2, img.width // 2)
    payloads = split_message(msg)
    mask = (1 << cfg.lsb_depth) - 1
    out = []
    for channel, payload, corner in zip(split_channels(img), payloads, placement.corners):
        bands = iwt_forward(channel)
        ll_h, ll_w = bands.ll.shape
        dark = _qr_bit_canvas(payload, cfg, placement, corner, ll_h, ll_w)
        cleared = bands.ll & ~np.int64(mask)
        ll = np.where(dark, cleared, cleared | np.int64(mask))
        rebuilt = iwt_inverse(IntegerBands(ll=ll, lh=bands.lh, hl=bands.hl, hh=bands.hh))
        out.append(clip_round(rebuilt))
    return merge_channels(out)


def extract_iwt(img: RasterImage, cfg: EmbedderConfig,
                placement: QrPlacement | None = None) -> Message:
    _require_rgb(img)
    if placement is None:
        placement = _placement_for(cfg, img.height // 2, img.width // 2)
    payloads = []
    for channel, corner in zip(split_channels(img), placement.corners):
        ll = iwt_forward(channel).ll
        grid = _read_qr_canvas(ll.astype(np.int64), cfg.lsb_depth, placement, corner)
        payloads.append(decode_qr(grid))
    return join_thirds(payloads, cfg.n_elements, strict=True)


# --------------------------------------------------------------------------
# Scheme: QIM on 8x8 DCT blocks
# --------------------------------------------------------------------------


def _dct_slot_count(img: RasterImage, cfg: EmbedderConfig) -> int:
    nbh = img.height // cfg.dct_block
    nbw = img.width // cfg.dct_block
    return nbh * nbw * len(_DCT_SLOTS)


def embed_dct_qim(img: RasterImage, msg: Message, cfg: EmbedderConfig) -> RasterImage:
    _require_rgb(img)
    if img.height % cfg.dct_block or img.width % cfg.dct_block:
        raise ValueError(f"dimensions must be divisible by {cfg.dct_block}")
    payloads = split_message(msg)
    rows = np.array([s[0] for s in _DCT_SLOTS])
    cols = np.array([s[1] for s in _DCT_SLOTS])
    out = []
    for channel, payload in zip(split_channels(img), payloads):
        bits = _tile_bits(_payload_bits(payload), _dct_slot_count(img, cfg))
        coefs = dct2_blocks(block_view(channel.astype(np.float64), cfg.dct_block))
        slab = coefs[:, :, rows, cols]
        coefs[:, :, rows, cols] = qim_embed(slab, bits.reshape(slab.shape), cfg.qs_dct)
        out.append(clip_round(unblock_view(idct2_blocks(coefs))))
    return merge_channels(out)


def _dct_slot_bits(channel: np.ndarray, cfg: EmbedderConfig) -> np.ndarray:
    rows = np.array([s[0] for s in _DCT_SLOTS])
    cols = np.array([s[1] for s in _DCT_SLOTS])
    coefs = dct2_blocks(block_view(channel.astype(np.float64), cfg.dct_block))
    return qim_extract(coefs[:, :, rows, cols], cfg.qs_dct).ravel()


def extract_dct_qim(img: RasterImage, cfg: EmbedderConfig) -> Message:
    _require_rgb(img)
    n_bits = third_length(cfg.n_elements) * 8
    payloads = []
    for channel in split_channels(img):
        voted = _vote_bits(_dct_slot_bits(channel, cfg), n_bits)
        payloads.append(_bits_to_payload(voted))
    return join_thirds(payloads, cfg.n_elements, strict=False)


# --------------------------------------------------------------------------
# Scheme: QIM on the Haar LL band
# --------------------------------------------------------------------------


def embed_dwt_qim(img: RasterImage, msg: Message, cfg: EmbedderConfig) -> RasterImage:
    _require_rgb(img)
    if img.height % 2 or img.width % 2:
        raise ValueError("even dimensions required for the wavelet transform")
    payloads = split_message(msg)
    out = []
    for channel, payload in zip(split_channels(img), payloads):
        bands = haar_dwt(channel.astype(np.float64))
        bits = _tile_bits(_payload_bits(payload), bands.ll.size)
        # Quantize at the sum-normalized scale (2x the stored average).
        ll = qim_embed(bands.ll.ravel() * 2.0, bits, cfg.qs_dwt).reshape(bands.ll.shape) / 2.0
        rebuilt = ihaar_dwt(WaveletBands(ll=ll, lh=bands.lh, hl=bands.hl, hh=bands.hh))
        out.append(clip_round(rebuilt))
    return merge_channels(out)


def _dwt_slot_bits(channel: np.ndarray, cfg: EmbedderConfig) -> np.ndarray:
    bands = haar_dwt(channel.astype(np.float64))
    return qim_extract(bands.ll.ravel() * 2.0, cfg.qs_dwt)


def extract_dwt_qim(img: RasterImage, cfg: EmbedderConfig) -> Message:
    _require_rgb(img)
    n_bits = third_length(cfg.n_elements) * 8
    payloads = []
    for channel in split_channels(img):
        voted = _vote_bits(_dwt_slot_bits(channel, cfg), n_bits)
        payloads.append(_bits_to_payload(voted))
    return join_thirds(payloads, cfg.n_elements, strict=False)


# --------------------------------------------------------------------------
# Dispatch + calibration
# --------------------------------------------------------------------------

_EMBEDDERS = {
    "qr-lsb": embed_qr_lsb,
    "iwt": embed_iwt,
    "dct-qim": embed_dct_qim,
    "dwt-qim": embed_dwt_qim,
}

_EXTRACTORS = {
    "qr-lsb": extract_qr_lsb,
    "iwt": extract_iwt,
    "dct-qim": extract_dct_qim,
    "dwt-qim": extract_dwt_qim,
}


def make_qr(payload: bytes, ecc: str = "M", mask: int | None = None) -> np.ndarray:
    """Binary module grid (True = dark) for a byte payload."""
    return encode_qr(payload, ecc=ecc, mask=mask).matrix


def embed(img: RasterImage, msg: Message, cfg: EmbedderConfig) -> RasterImage:
    return _EMBEDDERS[cfg.scheme](img, msg, cfg)


def extract(img: RasterImage, cfg: EmbedderConfig) -> Message:
    return _EXTRACTORS[cfg.scheme](img, cfg)


@dataclass(frozen=True)
class CalibrationResult:
    config: EmbedderConfig
    psnr_db: float
    within_tolerance: bool


def calibrate_strength(img: RasterImage, scheme: str, target_db: float = 36.0,
                       tol: float = 0.5, msg: Message | None = None) -> CalibrationResult:
    """Scan embedding strengths for a PSNR inside [target-tol, target+tol].

    The scan is deterministic, ascending in strength (LSB depth 1..7 or
    quantizer 10..80). If several strengths land in the band, the closest to
    the target wins; if none does, the nearest result above the target is
    reported with ``within_tolerance=False``.
    """
    if msg is None:
        from .experiments import generate_message

        msg = generate_message(0xCA11B, n_elements=10)
    results = []
    if scheme in ("qr-lsb", "iwt"):
        for depth in range(1, 8):
            cfg = EmbedderConfig(scheme=scheme, lsb_depth=depth, n_elements=msg.n_elements)
            results.append((cfg, psnr(img, embed(img, msg, cfg))))
    elif scheme in ("dct-qim", "dwt-qim"):
        for q in range(10, 81):
            if scheme == "dct-qim":
                cfg = EmbedderConfig(scheme=scheme, qs_dct=float(q), n_elements=msg.n_elements)
            else:
                cfg = EmbedderConfig(scheme=scheme, qs_dwt=float(q), n_elements=msg.n_elements)
            results.append((cfg, psnr(img, embed(img, msg, cfg))))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    in_band = [(c, p) for c, p in results if target_db - tol <= p <= target_db + tol]
    if in_band:
        cfg, p = min(in_band, key=lambda cp: abs(cp[1] - target_db))
        return CalibrationResult(config=cfg, psnr_db=p, within_tolerance=True)
    above = [(c, p) for c, p in results if p >= target_db]
    pool = above if above else results
    cfg, p = min(pool, key=lambda cp: abs(cp[1] - target_db))
    return CalibrationResult(config=cfg, psnr_db=p, within_tolerance=False)
