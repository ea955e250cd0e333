import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def rgb_image(rng):
    """Smooth-ish 64x80 RGB test image, multiple-of-8 sides."""
    base = rng.integers(0, 256, size=(8, 10, 3), dtype=np.uint8)
    img = np.repeat(np.repeat(base, 8, axis=0), 8, axis=1)
    noise = rng.integers(-12, 13, size=img.shape)
    return np.clip(img.astype(np.int32) + noise, 0, 255).astype(np.uint8)


@pytest.fixture
def gray_image(rng):
    return rng.integers(0, 256, size=(48, 48), dtype=np.uint8)
