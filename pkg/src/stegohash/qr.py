"""QR symbol engine: byte-mode encoding and decoding on exact module grids.

Supports versions 1-10 at all four error-correction levels, which covers
payloads up to 274 bytes. Symbols carry standard function patterns, format
and version information, mask patterns and interleaved Reed-Solomon blocks,
so they are readable by conforming QR readers. The decoder works on a clean
module matrix (True = dark) rather than a photograph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, ExtractionError
from .reed_solomon import rs_decode, rs_encode

MAX_VERSION = 10

ECC_LEVELS = ("L", "M", "Q", "H")

# Format-info bit pairs per level (ISO ordering).
_ECC_BITS = {"L": 0b01, "M": 0b00, "Q": 0b11, "H": 0b10}
_ECC_FROM_BITS = {v: k for k, v in _ECC_BITS.items()}

# version -> level -> (ec_per_block, ((n_blocks, data_codewords), ...)).
_EC_TABLE = {
    1: {"L": (7, ((1, 19),)), "M": (10, ((1, 16),)), "Q": (13, ((1, 13),)), "H": (17, ((1, 9),))},
    2: {"L": (10, ((1, 34),)), "M": (16, ((1, 28),)), "Q": (22, ((1, 22),)), "H": (28, ((1, 16),))},
    3: {"L": (15, ((1, 55),)), "M": (26, ((1, 44),)), "Q": (18, ((2, 17),)), "H": (22, ((2, 13),))},
    4: {"L": (20, ((1, 80),)), "M": (18, ((2, 32),)), "Q": (26, ((2, 24),)), "H": (16, ((4, 9),))},
    5: {
        "L": (26, ((1, 108),)),
        "M": (24, ((2, 43),)),
        "Q": (18, ((2, 15), (2, 16))),
        "H": (22, ((2, 11), (2, 12))),
    },
    6: {"L": (18, ((2, 68),)), "M": (16, ((4, 27),)), "Q": (24, ((4, 19),)), "H": (28, ((4, 15),))},
    7: {
        "L": (20, ((2, 78),)),
        "M": (18, ((4, 31),)),
        "Q": (18, ((2, 14), (4, 15))),
        "H": (26, ((4, 13), (1, 14))),
    },
    8: {
        "L": (24, ((2, 97),)),
        "M": (22, ((2, 38), (2, 39))),
        "Q": (22, ((4, 18), (2, 19))),
        "H": (26, ((4, 14), (2, 15))),
    },
    9: {
        "L": (30, ((2, 116),)),
        "M": (22, ((3, 36), (2, 37))),
        "Q": (20, ((4, 16), (4, 17))),
        "H": (24, ((4, 12), (4, 13))),
    },
    10: {
        "L": (18, ((2, 68), (2, 69))),
        "M": (26, ((4, 43), (1, 44))),
        "Q": (24, ((6, 19), (2, 20))),
        "H": (28, ((6, 15), (2, 16))),
    },
}

# Alignment pattern centre coordinates per version.
_ALIGN_POS = {
    1: (),
    2: (6, 18),
    3: (6, 22),
    4: (6, 26),
    5: (6, 30),
    6: (6, 34),
    7: (6, 22, 38),
    8: (6, 24, 42),
    9: (6, 26, 46),
    10: (6, 28, 50),
}

_FORMAT_GEN = 0x537  # BCH(15,5)
_FORMAT_MASK = 0x5412
_VERSION_GEN = 0x1F25  # BCH(18,6)


@dataclass(frozen=True)
class QrSymbol:
    matrix: np.ndarray  # bool, True = dark
    version: int
    ecc: str
    mask: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def side_length(version: int) -> int:
    return 17 + 4 * version


def data_capacity(version: int, ecc: str) -> int:
    """Maximum byte-mode payload length for a version/level pair."""
    ec_per_block, groups = _EC_TABLE[version][ecc]
    data_cw = sum(n * dc for n, dc in groups)
    count_bits = 16 if version >= 10 else 8
    return (8 * data_cw - 4 - count_bits) // 8


def version_for(payload_len: int, ecc: str) -> int:
    """Smallest supported version that fits the payload at the given level."""
    for version in range(1, MAX_VERSION + 1):
        if payload_len <= data_capacity(version, ecc):
            return version
    raise CapacityError(
        f"payload of {payload_len} bytes exceeds QR capacity at level {ecc} "
        f"(max {data_capacity(MAX_VERSION, ecc)} bytes at version {MAX_VERSION})"
    )


def _bch_remainder(value: int, generator: int, total_bits: int, data_bits: int) -> int:
    rem = value << (total_bits - data_bits)
    glen = generator.bit_length()
    for shift in range(total_bits - glen, -1, -1):
        if rem & (1 << (shift + glen - 1)):
            rem ^= generator << shift
    return rem


def format_bits(ecc: str, mask: int) -> int:
    data = (_ECC_BITS[ecc] << 3) | mask
    return ((data << 10) | _bch_remainder(data, _FORMAT_GEN, 15, 5)) ^ _FORMAT_MASK


def version_bits(version: int) -> int:
    return (version << 12) | _bch_remainder(version, _VERSION_GEN, 18, 6)


# --------------------------------------------------------------------------
# Matrix geometry
# --------------------------------------------------------------------------


def _alignment_centres(version: int):
    pos = _ALIGN_POS[version]
    side = side_length(version)
    centres = []
    for r in pos:
        for c in pos:
            if (r, c) in ((6, 6), (6, side - 7), (side - 7, 6)):
                continue
            centres.append((r, c))
    return centres


def _function_pattern_map(version: int) -> np.ndarray:
    """True where a module is reserved (finder, timing, format, ...)."""
    side = side_length(version)
    reserved = np.zeros((side, side), dtype=bool)
    for r0, c0 in ((0, 0), (0, side - 8), (side - 8, 0)):
        reserved[max(r0, 0):r0 + 8, max(c0, 0):c0 + 8] = True
    reserved[8, 0:9] = True
    reserved[0:9, 8] = True
    reserved[8, side - 8:] = True
    reserved[side - 8:, 8] = True
    reserved[6, :] = True
    reserved[:, 6] = True
    for r, c in _alignment_centres(version):
        reserved[r - 2:r + 3, c - 2:c + 3] = True
    if version >= 7:
        reserved[0:6, side - 11:side - 8] = True
        reserved[side - 11:side - 8, 0:6] = True
    return reserved


def _draw_function_patterns(matrix: np.ndarray, version: int) -> None:
    side = matrix.shape[0]
    # Dark iff on the outer ring or in the 3x3 centre.
    finder = np.array(
        [[(r in (0, 6) or c in (0, 6)) or (2 <= r <= 4 and 2 <= c <= 4) for c in range(7)] for r in range(7)]
    )
    for r0, c0 in ((0, 0), (0, side - 7), (side - 7, 0)):
        matrix[r0:r0 + 7, c0:c0 + 7] = finder
    cols = np.arange(8, side - 8)
    matrix[6, cols] = cols % 2 == 0
    matrix[cols, 6] = cols % 2 == 0
    for r, c in _alignment_centres(side_length_inverse(side)):
        for dr in range(-2, 3):
            for dc in range(-2, 3):
                matrix[r + dr, c + dc] = max(abs(dr), abs(dc)) != 1
    matrix[side - 8, 8] = True  # dark module


def side_length_inverse(side: int) -> int:
    version, rem = divmod(side - 17, 4)
    if rem or not (1 <= version <= MAX_VERSION):
        raise ExtractionError(f"module grid side {side} is not a supported QR size")
    return version


_FORMAT_COPY1 = (
    (8, 0), (8, 1), (8, 2), (8, 3), (8, 4), (8, 5), (8, 7), (8, 8),
    (7, 8), (5, 8), (4, 8), (3, 8), (2, 8), (1, 8), (0, 8),
)


def _format_copy2(side: int):
    cells = [(side - 1 - i, 8) for i in range(7)]
    cells += [(8, side - 8 + i) for i in range(8)]
    return cells


def _place_format(matrix: np.ndarray, bits: int) -> None:
    side = matrix.shape[0]
    for idx, (r, c) in enumerate(_FORMAT_COPY1):
        matrix[r, c] = bool((bits >> (14 - idx)) & 1)
    for idx, (r, c) in enumerate(_format_copy2(side)):
        matrix[r, c] = bool((bits >> (14 - idx)) & 1)


def _read_format(matrix: np.ndarray) -> tuple[str, int]:
    side = matrix.shape[0]
    read1 = 0
    for r, c in _FORMAT_COPY1:
        read1 = (read1 << 1) | int(matrix[r, c])
    read2 = 0
    for r, c in _format_copy2(side):
        read2 = (read2 << 1) | int(matrix[r, c])
    best = None
    for ecc_bits in range(4):
        for mask in range(8):
            expect = format_bits(_ECC_FROM_BITS[ecc_bits], mask)
            dist = min(bin(expect ^ read1).count("1"), bin(expect ^ read2).count("1"))
            if best is None or dist < best[0]:
                best = (dist, _ECC_FROM_BITS[ecc_bits], mask)
    dist, ecc, mask = best
    if dist > 3:
        raise ExtractionError("format information unreadable")
    return ecc, mask


def _place_version(matrix: np.ndarray, version: int) -> None:
    if version < 7:
        return
    side = matrix.shape[0]
    bits = version_bits(version)
    for i in range(18):
        bit = bool((bits >> i) & 1)
        matrix[side - 11 + i % 3, i // 3] = bit
        matrix[i // 3, side - 11 + i % 3] = bit


def _mask_matrix(side: int, mask: int) -> np.ndarray:
    r, c = np.indices((side, side))
    return {
        0: (r + c) % 2 == 0,
        1: r % 2 == 0,
        2: c % 3 == 0,
        3: (r + c) % 3 == 0,
        4: (r // 2 + c // 3) % 2 == 0,
        5: (r * c) % 2 + (r * c) % 3 == 0,
        6: ((r * c) % 2 + (r * c) % 3) % 2 == 0,
        7: ((r + c) % 2 + (r * c) % 3) % 2 == 0,
    }[mask]


def _data_coordinates(version: int):
    """Module coordinates in standard zig-zag placement order."""
    side = side_length(version)
    reserved = _function_pattern_map(version)
    coords = []
    col = side - 1
    upward = True
    while col > 0:
        if col == 6:
            col -= 1
        rows = range(side - 1, -1, -1) if upward else range(side)
        for row in rows:
            for c in (col, col - 1):
                if not reserved[row, c]:
                    coords.append((row, c))
        upward = not upward
        col -= 2
    return coords


# --------------------------------------------------------------------------
# Bitstream and block interleaving
# --------------------------------------------------------------------------


def _build_data_codewords(payload: bytes, version: int, ecc: str) -> bytes:
    ec_per_block, groups = _EC_TABLE[version][ecc]
    data_cw = sum(n * dc for n, dc in groups)
    count_bits = 16 if version >= 10 else 8
    if len(payload) > data_capacity(version, ecc):
        raise CapacityError(
            f"payload of {len(payload)} bytes does not fit version {version}-{ecc}"
        )
    bits = []

    def push(value: int, width: int) -> None:
        for i in range(width - 1, -1, -1):
            bits.append((value >> i) & 1)

    push(0b0100, 4)  # byte mode
    push(len(payload), count_bits)
    for byte in payload:
        push(byte, 8)
    terminator = min(4, 8 * data_cw - len(bits))
    push(0, terminator)
    if len(bits) % 8:
        push(0, 8 - len(bits) % 8)
    out = bytearray()
    for i in range(0, len(bits), 8):
        byte = 0
        for b in bits[i:i + 8]:
            byte = (byte << 1) | b
        out.append(byte)
    pad = (0xEC, 0x11)
    i = 0
    while len(out) < data_cw:
        out.append(pad[i % 2])
        i += 1
    return bytes(out)


def _block_sizes(version: int, ecc: str):
    ec_per_block, groups = _EC_TABLE[version][ecc]
    sizes = []
    for n, dc in groups:
        sizes.extend([dc] * n)
    return ec_per_block, sizes


def _interleave(version: int, ecc: str, data: bytes) -> bytes:
    ec_per_block, sizes = _block_sizes(version, ecc)
    blocks = []
    offset = 0
    for dc in sizes:
        blocks.append(data[offset:offset + dc])
        offset += dc
    ec_blocks = [rs_encode(b, ec_per_block)[-ec_per_block:] for b in blocks]
    out = bytearray()
    for i in range(max(sizes)):
        for b in blocks:
            if i < len(b):
                out.append(b[i])
    for i in range(ec_per_block):
        for e in ec_blocks:
            out.append(e[i])
    return bytes(out)


def _deinterleave(version: int, ecc: str, codewords: bytes) -> list[bytes]:
    """Split the interleaved stream back into per-block (data + ec) words."""
    ec_per_block, sizes = _block_sizes(version, ecc)
    blocks = [bytearray() for _ in sizes]
    pos = 0
    for i in range(max(sizes)):
        for j, dc in enumerate(sizes):
            if i < dc:
                blocks[j].append(codewords[pos])
                pos += 1
    ecs = [bytearray() for _ in sizes]
    for i in range(ec_per_block):
        for j in range(len(sizes)):
            ecs[j].append(codewords[pos])
            pos += 1
    return [bytes(b) + bytes(e) for b, e in zip(blocks, ecs)]


# --------------------------------------------------------------------------
# Mask penalty scoring (ISO rules N1-N4)
# --------------------------------------------------------------------------


def _penalty(matrix: np.ndarray) -> int:
    side = matrix.shape[0]
    score = 0
    for axis_view in (matrix, matrix.T):
        for line in axis_view:
            run = 1
            for i in range(1, side):
                if line[i] == line[i - 1]:
                    run += 1
                else:
                    if run >= 5:
                        score += 3 + run - 5
                    run = 1
            if run >= 5:
                score += 3 + run - 5
    same = (
        (matrix[:-1, :-1] == matrix[1:, :-1])
        & (matrix[:-1, :-1] == matrix[:-1, 1:])
        & (matrix[:-1, :-1] == matrix[1:, 1:])
    )
    score += 3 * int(np.count_nonzero(same))
    pattern = np.array([1, 0, 1, 1, 1, 0, 1], dtype=bool)
    zeros4 = np.zeros(4, dtype=bool)
    pat_a = np.concatenate([pattern, zeros4])
    pat_b = np.concatenate([zeros4, pattern])
    for axis_view in (matrix, matrix.T):
        for line in axis_view:
            for start in range(side - 10):
                window = line[start:start + 11]
                if np.array_equal(window, pat_a) or np.array_equal(window, pat_b):
                    score += 40
    dark_pct = 100.0 * np.count_nonzero(matrix) / matrix.size
    score += 10 * int(abs(dark_pct - 50) // 5)
    return score


# --------------------------------------------------------------------------
# Public encode / decode
# --------------------------------------------------------------------------


def encode_qr(payload: bytes, ecc: str = "M", mask: int | None = None,
              version: int | None = None) -> QrSymbol:
    """Encode a byte payload into a QR module matrix.

    ``mask=None`` selects the mask by penalty score; a fixed mask in [0, 7]
    still yields a conforming symbol and keeps re-encodings comparable.
    """
    if ecc not in ECC_LEVELS:
        raise ValueError(f"unknown ECC level {ecc!r}")
    if version is None:
        version = version_for(len(payload), ecc)
    elif not 1 <= version <= MAX_VERSION:
        raise ValueError(f"version must be in [1, {MAX_VERSION}]")
    side = side_length(version)
    codewords = _interleave(version, ecc, _build_data_codewords(payload, version, ecc))

    bits = []
    for byte in codewords:
        for i in range(7, -1, -1):
            bits.append((byte >> i) & 1)
    coords = _data_coordinates(version)
    bits.extend([0] * (len(coords) - len(bits)))

    base = np.zeros((side, side), dtype=bool)
    _draw_function_patterns(base, version)
    _place_version(base, version)
    for (r, c), bit in zip(coords, bits):
        base[r, c] = bool(bit)

    data_map = ~_function_pattern_map(version)

    def apply_mask(m: int) -> np.ndarray:
        out = base.copy()
        out[data_map] ^= _mask_matrix(side, m)[data_map]
        _place_format(out, format_bits(ecc, m))
        return out

    if mask is not None:
        if not 0 <= mask <= 7:
            raise ValueError("mask must be in [0, 7]")
        return QrSymbol(matrix=apply_mask(mask), version=version, ecc=ecc, mask=mask)
    best = min(range(8), key=lambda m: (_penalty(apply_mask(m)), m))
    return QrSymbol(matrix=apply_mask(best), version=version, ecc=ecc, mask=best)


def decode_qr(matrix: np.ndarray) -> bytes:
    """Decode a byte-mode payload from a module matrix (True = dark)."""
    matrix = np.asarray(matrix, dtype=bool)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ExtractionError(f"module grid must be square, got {matrix.shape}")
    side = matrix.shape[0]
    version = side_length_inverse(side)
    ecc, mask = _read_format(matrix)

    unmasked = matrix.copy()
    data_map = ~_function_pattern_map(version)
    unmasked[data_map] ^= _mask_matrix(side, mask)[data_map]

    coords = _data_coordinates(version)
    bits = [int(unmasked[r, c]) for r, c in coords]
    n_codewords = len(bits) // 8
    codewords = bytearray()
    for i in range(n_codewords):
        byte = 0
        for b in bits[8 * i:8 * i + 8]:
            byte = (byte << 1) | b
        codewords.append(byte)

    ec_per_block, sizes = _block_sizes(version, ecc)
    data = bytearray()
    for block in _deinterleave(version, ecc, bytes(codewords)):
        data.extend(rs_decode(block, ec_per_block))

    stream = _BitReader(bytes(data))
    mode = stream.take(4)
    if mode == 0b0000:
        return b""
    if mode != 0b0100:
        raise ExtractionError(f"unsupported QR mode indicator {mode:04b}")
    count_bits = 16 if version >= 10 else 8
    length = stream.take(count_bits)
    payload = bytes(stream.take(8) for _ in range(length))
    return payload


class _BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> int:
        value = 0
        for _ in range(n):
            byte = self._data[self._pos >> 3]
            bit = (byte >> (7 - (self._pos & 7))) & 1
            value = (value << 1) | bit
            self._pos += 1
            if self._pos > 8 * len(self._data):
                raise ExtractionError("QR bitstream truncated")
        return value


def render_qr(matrix: np.ndarray, scale: int = 4, border: int = 4) -> np.ndarray:
    """Render a module grid as a uint8 image (dark = 0), for external readers."""
    m = np.asarray(matrix, dtype=bool)
    img = np.where(m, 0, 255).astype(np.uint8)
    img = np.kron(img, np.ones((scale, scale), dtype=np.uint8))
    pad = border * scale
    return np.pad(img, pad, constant_values=255)
