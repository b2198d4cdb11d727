import numpy as np
import pytest

from stegohash.exceptions import CapacityError, ExtractionError
from stegohash.qr import (
    MAX_VERSION,
    data_capacity,
    decode_qr,
    encode_qr,
    render_qr,
    side_length,
    version_for,
)
from stegohash.reed_solomon import rs_decode, rs_encode

cv2 = pytest.importorskip("cv2")


# ---------------------------------------------------------------- RS codec


def test_rs_round_trip_no_errors():
    data = bytes(range(40))
    assert rs_decode(rs_encode(data, 16), 16) == data


@pytest.mark.parametrize("n_errors", [1, 4, 8])
def test_rs_corrects_up_to_capacity(n_errors):
    rng = np.random.default_rng(n_errors)
    data = bytes(rng.integers(0, 256, 50, dtype=np.uint8).tolist())
    cw = bytearray(rs_encode(data, 16))
    for pos in rng.choice(len(cw), size=n_errors, replace=False):
        cw[pos] ^= int(rng.integers(1, 256))
    assert rs_decode(bytes(cw), 16) == data


def test_rs_detects_overload():
    rng = np.random.default_rng(9)
    data = bytes(rng.integers(0, 256, 50, dtype=np.uint8).tolist())
    cw = bytearray(rs_encode(data, 10))
    for pos in rng.choice(len(cw), size=9, replace=False):
        cw[pos] ^= int(rng.integers(1, 256))
    with pytest.raises(ExtractionError):
        out = rs_decode(bytes(cw), 10)
        assert out != data  # miscorrection would be caught by caller integrity


# ---------------------------------------------------------------- QR engine


def test_smallest_version_selection():
    assert version_for(0, "M") == 1
    assert version_for(77 + 1, "M") == 5  # a channel third of the default message


def test_capacity_bound_raises():
    too_big = data_capacity(MAX_VERSION, "M") + 1
    with pytest.raises(CapacityError):
        version_for(too_big, "M")
    with pytest.raises(CapacityError):
        encode_qr(bytes(too_big), ecc="M")


def test_empty_payload_round_trips():
    sym = encode_qr(b"", ecc="M")
    assert sym.version == 1 and sym.size == side_length(1)
    assert decode_qr(sym.matrix) == b""


@pytest.mark.parametrize("ecc", ["L", "M", "Q", "H"])
def test_round_trip_all_levels(ecc):
    rng = np.random.default_rng(hash(ecc) % 2**32)
    payload = bytes(rng.integers(0, 256, 30, dtype=np.uint8).tolist())
    sym = encode_qr(payload, ecc=ecc)
    assert decode_qr(sym.matrix) == payload


@pytest.mark.parametrize("version", list(range(1, MAX_VERSION + 1)))
def test_round_trip_at_capacity_each_version(version):
    rng = np.random.default_rng(version)
    n = data_capacity(version, "M")
    payload = bytes(rng.integers(0, 256, n, dtype=np.uint8).tolist())
    sym = encode_qr(payload, ecc="M", version=version)
    assert sym.size == side_length(version)
    assert decode_qr(sym.matrix) == payload


def test_fixed_mask_honored():
    for mask in range(8):
        sym = encode_qr(b"masked", ecc="M", mask=mask)
        assert sym.mask == mask
        assert decode_qr(sym.matrix) == b"masked"


def test_error_correction_margin():
    payload = bytes(range(78))
    sym = encode_qr(payload, ecc="M")
    rng = np.random.default_rng(4)
    m = sym.matrix.copy()
    flat = m.ravel()
    for i in rng.choice(m.size, size=20, replace=False):
        flat[i] ^= True
    assert decode_qr(m) == payload


def test_blank_grids_fail():
    side = side_length(2)
    with pytest.raises(ExtractionError):
        decode_qr(np.zeros((side, side), dtype=bool))
    with pytest.raises(ExtractionError):
        decode_qr(np.ones((side, side), dtype=bool))


def test_bad_grid_size():
    with pytest.raises(ExtractionError):
        decode_qr(np.zeros((20, 20), dtype=bool))


def test_conforming_reader_oracle():
    """Independent reader check: OpenCV must decode our symbols."""
    det = cv2.QRCodeDetector()
    det_aruco = cv2.QRCodeDetectorAruco()
    for text, ecc in [("stegohash oracle", "M"), ("A" * 70, "Q"), ("short", "H")]:
        sym = encode_qr(text.encode(), ecc=ecc)
        img = render_qr(sym.matrix, scale=8, border=4)
        decoded = det.detectAndDecode(img)[0] or det_aruco.detectAndDecode(img)[0]
        assert decoded == text, f"conforming reader failed on v{sym.version}-{ecc}"


def test_conforming_reader_oracle_high_version():
    det = cv2.QRCodeDetector()
    det_aruco = cv2.QRCodeDetectorAruco()
    text = "x" * 150  # forces a version with version-information blocks
    sym = encode_qr(text.encode(), ecc="M")
    assert sym.version >= 7
    img = render_qr(sym.matrix, scale=8, border=4)
    decoded = det.detectAndDecode(img)[0] or det_aruco.detectAndDecode(img)[0]
    assert decoded == text
