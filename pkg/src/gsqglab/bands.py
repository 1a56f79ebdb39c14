"""Dyadic band decomposition with a smooth compactly supported bump.

The bump is even, equals 1 on [-5/4, 5/4], vanishes off [-8/5, 8/5], and
transitions with the standard exp(-1/s) mollifier ramp.  Band multipliers
are differences of dilates of the bump, so they sum telescopically to a
partition of unity on the covered frequency range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, SpectralField

PLATEAU = 1.25
SUPPORT = 1.6


class BandRangeError(ValueError):
    """Raised when a band index is outside the configured range."""


def bump(x) -> np.ndarray:
    """Smooth even cutoff: 1 on |x|<=5/4, 0 on |x|>=8/5."""
    ax = np.abs(np.asarray(x, dtype=float))
    s = (ax - PLATEAU) / (SUPPORT - PLATEAU)
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        g = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    out = g / (f + g)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LPBandSet:
    """Dyadic bands k_min..k_max built from the fixed bump."""

    k_min: int
    k_max: int

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise BandRangeError(f"empty band range [{self.k_min}, {self.k_max}]")

    def check(self, k: int) -> None:
        if not (self.k_min <= k <= self.k_max):
            raise BandRangeError(
                f"band {k} outside configured range [{self.k_min}, {self.k_max}]"
            )

    def phi_k(self, k: int, xi) -> np.ndarray:
        self.check(k)
        return bump(np.asarray(xi) / 2.0**k) - bump(np.asarray(xi) / 2.0 ** (k - 1))

    def phi_le(self, k: int, xi) -> np.ndarray:
        self.check(k)
        return bump(np.asarray(xi) / 2.0**k)

    def phi_ge(self, k: int, xi) -> np.ndarray:
        self.check(k)
        return 1.0 - bump(np.asarray(xi) / 2.0 ** (k - 1))

    def partition_sum(self, xi) -> np.ndarray:
        """Sum of phi_k over the configured range (telescopes)."""
        return bump(np.asarray(xi) / 2.0**self.k_max) - bump(
            np.asarray(xi) / 2.0 ** (self.k_min - 1)
        )


def bands_for_grid(grid: Grid) -> LPBandSet:
    """Smallest band range whose partition of unity covers every nonzero
    grid frequency."""
    # Lowest band: the k_min-1 dilate must vanish at the smallest |xi|.
    k_min = math.floor(math.log2(grid.dxi / SUPPORT)) + 1
    # Highest band: the k_max dilate must be 1 at the largest |xi|.
    k_max = math.ceil(math.log2(grid.xi_max / PLATEAU))
    return LPBandSet(k_min=k_min, k_max=k_max)


def _apply(field: SpectralField, mult: np.ndarray) -> SpectralField:
    coeffs = field.coeffs * mult
    coeffs[field.grid.nyquist_index] = 0.0
    return SpectralField(field.grid, coeffs)


def lp_project(bands: LPBandSet, field: SpectralField, k: int) -> SpectralField:
    return _apply(field, bands.phi_k(k, field.grid.freqs))


def lp_project_le(bands: LPBandSet, field: SpectralField, k: int) -> SpectralField:
    return _apply(field, bands.phi_le(k, field.grid.freqs))


def lp_project_ge(bands: LPBandSet, field: SpectralField, k: int) -> SpectralField:
    return _apply(field, bands.phi_ge(k, field.grid.freqs))
