import numpy as np
import pytest

from cellsearch.channel import PulseShape, TapProfile, builtin_profile


@pytest.fixture(scope="session")
def etu() -> TapProfile:
    return builtin_profile("etu")


@pytest.fixture(scope="session")
def pulse() -> PulseShape:
    return PulseShape()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


def random_window(rng, n_q=60, scale=1.0):
    """Data-like Gaussian window stack (no PSS), for metric-level tests."""
    raw = rng.standard_normal((n_q, 73, 2))
    return scale * (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
