import numpy as np
import pytest

from stegohash.experiments import generate_message
from stegohash.imagecore import RasterImage
from stegohash.testimages import synthetic_baboon, synthetic_lenna, synthetic_peppers


@pytest.fixture(scope="session")
def images():
    """The three full-size synthetic test scenes."""
    return {
        "lenna": synthetic_lenna(),
        "baboon": synthetic_baboon(),
        "peppers": synthetic_peppers(),
    }


@pytest.fixture(scope="session")
def small_images():
    """Quarter-size variants for cheap unit tests."""
    return {
        "lenna": synthetic_lenna(128),
        "baboon": synthetic_baboon(128),
        "peppers": synthetic_peppers(128),
    }


@pytest.fixture(scope="session")
def noise_image():
    rng = np.random.default_rng(3)
    return RasterImage(rng.integers(0, 256, (3, 128, 128), dtype=np.uint8))


@pytest.fixture(scope="session")
def message10():
    return generate_message(7, 10)
