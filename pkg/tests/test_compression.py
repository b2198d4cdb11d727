import numpy as np
import pytest

from stegohash.compression import (
    compress,
    compress_dct,
    compress_dwt,
    compress_klt,
    compress_quadtree,
    compress_spline,
    klt_reconstruct_channel,
    _zigzag_order,
)
from stegohash.imagecore import RasterImage
from stegohash.perceptual import psnr


def _constant(value, size=64):
    return RasterImage(np.full((1, size, size), value, dtype=np.uint8))


def test_zigzag_order_prefix():
    assert _zigzag_order()[:10] == [
        (0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2), (0, 3), (1, 2), (2, 1), (3, 0),
    ]
    assert len(set(_zigzag_order())) == 64


# ---------------------------------------------------------------- DCT


def test_dct_full_level_is_near_identity(small_images):
    img = small_images["lenna"]
    result = compress_dct(img, 1.0)
    assert result.level == 1.0
    assert psnr(img, result.image) > 50


def test_dct_dc_only_gives_block_means(small_images):
    img = small_images["baboon"]
    result = compress_dct(img, 0.02)
    assert result.level == 1 / 64
    ch = img.planes[0].astype(np.float64)
    means = ch.reshape(16, 8, 16, 8).mean(axis=(1, 3))
    expected = np.kron(means, np.ones((8, 8)))
    assert np.max(np.abs(result.image.planes[0].astype(float) - expected)) <= 1.0


def test_dct_level_out_of_range(small_images):
    with pytest.raises(ValueError):
        compress_dct(small_images["lenna"], 0.0)
    with pytest.raises(ValueError):
        compress_dct(small_images["lenna"], 1.5)


def test_dct_monotone_in_level(small_images):
    img = small_images["lenna"]
    values = [psnr(img, compress_dct(img, lv).image) for lv in (0.7, 0.3, 0.1, 0.02)]
    assert all(a >= b for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------- DWT


@pytest.mark.parametrize("levels,expected", [(1, 0.25), (2, 0.0625), (3, 0.015625)])
def test_dwt_levels(levels, expected, small_images):
    result = compress_dwt(small_images["lenna"], levels)
    assert result.level == expected
    assert result.image.planes.shape == small_images["lenna"].planes.shape


def test_dwt_constant_image_exact():
    img = _constant(137)
    result = compress_dwt(img, 3)
    assert psnr(img, result.image) == float("inf")


def test_dwt_rejects_bad_levels(small_images):
    with pytest.raises(ValueError):
        compress_dwt(small_images["lenna"], 4)


# ---------------------------------------------------------------- KLT


def test_klt_full_basis_reconstruction_error(small_images):
    ch = small_images["lenna"].planes[0]
    recon = klt_reconstruct_channel(ch, 64)
    assert np.max(np.abs(recon - ch.astype(np.float64))) < 1e-6


def test_klt_constant_image_exact():
    img = _constant(99)
    result = compress_klt(img, 5)
    assert psnr(img, result.image) == float("inf")
    assert result.level == 5 / 64


def test_klt_beats_dct_on_lenna(small_images):
    img = small_images["lenna"]
    for level, kept in ((0.7, 45), (0.2, 13), (0.05, 3)):
        p_dct = psnr(img, compress_dct(img, level).image)
        p_klt = psnr(img, compress_klt(img, kept).image)
        assert p_klt >= p_dct


def test_klt_param_bounds(small_images):
    with pytest.raises(ValueError):
        compress_klt(small_images["lenna"], 0)
    with pytest.raises(ValueError):
        compress_klt(small_images["lenna"], 65)


def test_klt_deterministic(small_images):
    img = small_images["peppers"]
    a = compress_klt(img, 13).image
    b = compress_klt(img, 13).image
    assert a == b


# ---------------------------------------------------------------- Quadtree


def test_quadtree_constant_image_single_leaf():
    img = _constant(100, size=256)
    result = compress_quadtree(img, 5)
    assert psnr(img, result.image) == float("inf")
    # root leaf: 1 byte + 1 node bit per channel
    assert result.level == pytest.approx(9 / (256 * 256 * 8))


def test_quadtree_depth_bounds(small_images):
    with pytest.raises(ValueError):
        compress_quadtree(small_images["lenna"], 9)
    with pytest.raises(ValueError):
        compress_quadtree(small_images["lenna"], 2)


def test_quadtree_requires_square_power_of_two():
    img = RasterImage(np.zeros((1, 96, 96), dtype=np.uint8))
    with pytest.raises(ValueError):
        compress_quadtree(img, 4)


def test_quadtree_half_plane_exact():
    planes = np.zeros((1, 128, 128), dtype=np.uint8)
    planes[:, :, 64:] = 255
    img = RasterImage(planes)
    result = compress_quadtree(img, 4, split_threshold=0.0)
    assert psnr(img, result.image) == float("inf")


def test_quadtree_threshold_controls_splitting(small_images):
    img = small_images["baboon"]
    fine = compress_quadtree(img, 6, split_threshold=5.0)
    coarse = compress_quadtree(img, 6, split_threshold=100.0)
    assert fine.level > coarse.level
    assert psnr(img, fine.image) >= psnr(img, coarse.image)


# ---------------------------------------------------------------- Spline


def test_spline_level_values(small_images):
    assert compress_spline(small_images["lenna"], 2).level == 0.25
    assert compress_spline(small_images["lenna"], 7).level == pytest.approx(1 / 49)


def test_spline_reproduces_bilinear_ramp():
    yy, xx = np.indices((64, 64), dtype=np.int64)
    ramp = 10 + yy + 2 * xx  # integer-valued plane, max 199
    img = RasterImage(ramp[np.newaxis].astype(np.uint8))
    for n in range(2, 8):
        result = compress_spline(img, n)
        assert result.image == img


def test_spline_monotone(small_images):
    img = small_images["peppers"]
    assert psnr(img, compress_spline(img, 2).image) > psnr(img, compress_spline(img, 7).image)


def test_spline_param_bounds(small_images):
    with pytest.raises(ValueError):
        compress_spline(small_images["lenna"], 1)
    with pytest.raises(ValueError):
        compress_spline(small_images["lenna"], 8)


# ---------------------------------------------------------------- shared


@pytest.mark.parametrize(
    "algorithm,param",
    [("dct", 0.3), ("dwt", 2), ("klt", 19), ("quadtree", 5), ("spline", 3)],
)
def test_dispatch_and_shape_preservation(algorithm, param, small_images):
    img = small_images["baboon"]
    result = compress(img, algorithm, param)
    assert result.image.planes.shape == img.planes.shape
    assert 0 < result.level <= 1
    assert result.algorithm == algorithm
    again = compress(img, algorithm, param)
    assert again.image == result.image  # determinism


def test_dispatch_unknown_algorithm(small_images):
    with pytest.raises(ValueError):
        compress(small_images["lenna"], "jpeg", 0.5)
