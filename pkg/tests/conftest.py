"""Shared fixtures: parameter sets, small grids, and a cached symbol table."""

import numpy as np
import pytest

from gsqglab.grid import Grid, from_samples
from gsqglab.params import make_alpha_params


@pytest.fixture(scope="session")
def params():
    """The default fractional order used throughout the suite."""
    return make_alpha_params(1.5)


@pytest.fixture(scope="session")
def small_grid():
    """A grid cheap enough for per-test quadrature evaluations."""
    return Grid(period_l=20.0 * np.pi, n_modes=256)


@pytest.fixture
def three_mode_field(small_grid):
    """Deterministic random 3-mode field of amplitude ~1e-2."""
    rng = np.random.default_rng(7)
    x = small_grid.nodes
    dxi = small_grid.dxi
    samples = np.zeros_like(x)
    for k in rng.integers(1, 8, size=3):
        samples += np.cos(dxi * int(k) * x + rng.uniform(0, 2 * np.pi))
    samples *= 1e-2 / np.max(np.abs(samples))
    return from_samples(small_grid, samples)
