"""Periodic grid and spectral fields.

The real line is approximated by one large periodic cell of length
``period_l``; initial data is expected to be localized well inside the
central half of the cell so that wrap-around is negligible and measurable.

Spectral coefficients use the continuum normalization

    coeffs[k] ~ integral h(x) exp(-i xi_k x) dx = (L/N) * fft(samples)[k]

so that norms and multiplier formulas match their real-line counterpart
with frequency measure d(xi) = 2*pi/L.  Coefficients are stored in FFT
order; the Nyquist mode is kept at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import AlphaParams, dispersion


class GridError(ValueError):
    """Raised for invalid grid geometry."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: nodes x_j = j*L/N - L/2, freqs 2*pi*k/L."""

    period_l: float
    n_modes: int

    def __post_init__(self):
        n = self.n_modes
        if self.period_l <= 0:
            raise GridError(f"period_l must be positive; got {self.period_l!r}")
        if n < 64 or (n & (n - 1)) != 0:
            raise GridError(f"n_modes must be a power of two >= 64; got {n!r}")

    @property
    def dx(self) -> float:
        return self.period_l / self.n_modes

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.period_l

    @property
    def nodes(self) -> np.ndarray:
        n = self.n_modes
        return np.arange(n) * (self.period_l / n) - self.period_l / 2.0

    @property
    def freqs(self) -> np.ndarray:
        """Frequencies in FFT order; xi_k = 2*pi*k/L for k in [-N/2, N/2)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_modes, d=self.period_l / self.n_modes)

    @property
    def nyquist_index(self) -> int:
        return self.n_modes // 2

    @property
    def xi_max(self) -> float:
        return np.pi / self.dx


@dataclass
class SpectralField:
    """One real-valued function, held as spectral coefficients on a grid."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def values(self) -> np.ndarray:
        """Physical samples at the grid nodes."""
        n, l = self.grid.n_modes, self.grid.period_l
        # Node 0 sits at x = -L/2, so undo the fft's implicit x_0 = 0 origin.
        phase = np.exp(-1j * self.grid.freqs * (l / 2.0))
        return np.fft.ifft(self.coeffs * phase).real * (n / l)

    def values_complex(self) -> np.ndarray:
        """Physical samples without taking the real part (for profiles)."""
        n, l = self.grid.n_modes, self.grid.period_l
        phase = np.exp(-1j * self.grid.freqs * (l / 2.0))
        return np.fft.ifft(self.coeffs * phase) * (n / l)


def from_samples(grid: Grid, samples: np.ndarray) -> SpectralField:
    """Forward transform of physical samples taken at ``grid.nodes``."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n_modes,):
        raise GridError(
            f"expected {grid.n_modes} samples, got shape {samples.shape}"
        )
    phase = np.exp(1j * grid.freqs * (grid.period_l / 2.0))
    coeffs = np.fft.fft(samples) * (grid.period_l / grid.n_modes) * phase
    coeffs[grid.nyquist_index] = 0.0
    return SpectralField(grid, coeffs)


def zero_field(grid: Grid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.n_modes, dtype=complex))


def zero_nyquist(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    coeffs[grid.nyquist_index] = 0.0
    return coeffs


def reality_defect(f: SpectralField) -> float:
    """Max deviation from coeff(-xi) = conj(coeff(xi)), scaled by the peak."""
    c = f.coeffs
    mirrored = np.conj(np.roll(c[::-1], 1))
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(c - mirrored)) / scale)


def propagate(params: AlphaParams, f: SpectralField, t: float) -> SpectralField:
    """Free propagator exp(i t Lambda): unitary in L2, preserves reality."""
    lam = dispersion(params, f.grid.freqs)
    coeffs = f.coeffs * np.exp(1j * t * lam)
    coeffs[f.grid.nyquist_index] = 0.0
    return SpectralField(f.grid, coeffs)


def spectral_derivative(f: SpectralField) -> SpectralField:
    coeffs = f.coeffs * (1j * f.grid.freqs)
    coeffs[f.grid.nyquist_index] = 0.0
    return SpectralField(f.grid, coeffs)


def l2_norm(f: SpectralField) -> float:
    """Physical L2 norm, computed spectrally (Parseval)."""
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2) / f.grid.period_l))


def tail_mass_fraction(f: SpectralField) -> float:
    """Fraction of |h| mass outside the central half of the cell."""
    vals = np.abs(f.values())
    total = vals.sum()
    if total == 0.0:
        return 0.0
    n = f.grid.n_modes
    outer = vals[: n // 4].sum() + vals[3 * n // 4 :].sum()
    return float(outer / total)
