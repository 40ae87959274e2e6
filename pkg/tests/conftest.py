import numpy as np
import pytest

from gnwaves.params import PhysParams
from gnwaves.spectral import Grid

# reference-experiment parameter set used throughout
REF_PARAMS = PhysParams(gamma=0.95, epsilon=0.5, mu=0.1, delta=0.5, inv_bond=5e-4)


@pytest.fixture
def grid():
    return Grid(512, 4.0)


@pytest.fixture
def small_grid():
    return Grid(64, 4.0)


def random_smooth_field(grid, rng, max_abs=1.0, modes=8):
    """Band-limited random field with the requested max-norm."""
    coeffs = np.zeros(grid.n // 2 + 1, dtype=complex)
    m = np.arange(1, modes + 1)
    coeffs[1 : modes + 1] = (rng.standard_normal(modes) + 1j * rng.standard_normal(modes)) / (1 + m)
    f = np.fft.irfft(coeffs, grid.n)
    peak = np.max(np.abs(f))
    if peak == 0.0:
        return f
    return f * (max_abs / peak)
