"""Monitored norms: Sobolev, scaling-weighted, Z-norm, per-band sups.

Fractional Sobolev exponents are applied as multiplier weights
(1 + xi^2)^(s/2) -- never as repeated differentiation -- and all L2-type
norms go through Parseval with the discrete frequency measure 2*pi/L.

The scaling vector field S = alpha*t*d_t + x*d_x generates the symmetry
of the linear equation; acting on h it reduces to

    S h = e^{i t Lambda} (x d_x v) + alpha * t * N(h)

where v is the profile and N the nonlinearity, so the time derivative is
taken from the equation, not from finite differences of the run.  The
x-multiplication is windowed to the central half of the periodic cell,
since x*d_x is not periodic; the discarded mass is checked against the
localization precondition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import LPBandSet, lp_project
from .evolution import SimState
from .grid import Grid, SpectralField, from_samples, l2_norm, spectral_derivative
from .params import AlphaParams, dispersion

__all__ = [
    "LocalizationError",
    "DiagnosticsRecord",
    "REL_FLOOR",
    "sobolev_norm",
    "z_norm",
    "x_dx_windowed",
    "scaling_norms",
    "decay_monitor",
    "bootstrap_composite",
    "record_from_state",
]

# Fraction of |x * v_x| mass allowed outside the flat part of the window.
LOCALIZATION_LIMIT = 0.05

# Relative amplitude below which a coefficient is treated as measurement
# noise.  Double-precision transforms carry white coefficient noise a few
# orders above machine epsilon times the peak amplitude; the steep
# high-frequency weights in the monitored norms would otherwise amplify
# that noise above the physical signal.
REL_FLOOR = 1e-13


def _denoised_amplitudes(coeffs: np.ndarray, rel_floor: float) -> np.ndarray:
    """|coeffs| with entries below rel_floor * max|coeffs| zeroed."""
    amp = np.abs(coeffs)
    peak = float(np.max(amp, initial=0.0))
    if peak > 0.0:
        amp = np.where(amp >= rel_floor * peak, amp, 0.0)
    return amp


class LocalizationError(RuntimeError):
    """Too much field mass near the cell edge for x-weighted quantities."""


@dataclass
class DiagnosticsRecord:
    """One row of the monitored-quantity time series."""

    t: float
    sobolev_h_n0alpha: float
    s_norm_h_n1alpha: float
    weighted_profile_norm: float
    z_norm: float
    band_sup: dict[int, float] = field(default_factory=dict)
    linf_hx: float = 0.0
    l2_h: float = 0.0


def sobolev_norm(
    params: AlphaParams,
    f: SpectralField,
    s_exponent: float,
    rel_floor: float = REL_FLOOR,
) -> float:
    """Fractional Sobolev norm (sum (1+xi^2)^s |fhat|^2 dxi/(2 pi))^(1/2).

    Coefficients below ``rel_floor`` times the peak amplitude are treated
    as zero; see REL_FLOOR.
    """
    if s_exponent < 0:
        raise ValueError(f"s_exponent must be >= 0; got {s_exponent!r}")
    xi = f.grid.freqs
    w = (1.0 + xi * xi) ** s_exponent
    amp = _denoised_amplitudes(f.coeffs, rel_floor)
    return float(np.sqrt(np.sum(w * amp * amp) / f.grid.period_l))


def z_norm(
    params: AlphaParams,
    v_hat: SpectralField,
    rel_floor: float = REL_FLOOR,
) -> float:
    """Weighted sup of the profile's per-mode amplitude |vhat(xi)|.

    sup over nonzero grid xi of (|xi|^(1/2+beta) + |xi|^(N2*alpha+1))
    times the amplitude; both weights equal 1 at |xi| = 1.  Amplitudes
    below ``rel_floor`` times the peak are treated as zero; see REL_FLOOR.
    """
    xi = v_hat.grid.freqs
    amp = _denoised_amplitudes(v_hat.coeffs, rel_floor) / v_hat.grid.period_l
    nz = xi != 0.0
    a = np.abs(xi[nz])
    w = a ** (0.5 + params.beta) + a ** (params.n2 * params.alpha + 1.0)
    return float(np.max(w * amp[nz], initial=0.0))


def _window(grid: Grid) -> np.ndarray:
    """Smooth plateau: 1 on the central half-cell, 0 at the cell edge."""
    x = np.abs(grid.nodes) / (grid.period_l / 2.0)
    # cos^2 ramp between 50% and 95% of the half-cell.
    s = np.clip((x - 0.5) / 0.45, 0.0, 1.0)
    return np.cos(0.5 * np.pi * s) ** 2


def x_dx_windowed(f: SpectralField) -> tuple[SpectralField, float]:
    """Windowed x * d_x f and the mass fraction outside the window plateau."""
    grid = f.grid
    fx = spectral_derivative(f).values_complex()
    weighted = np.abs(grid.nodes * fx)
    total = float(np.sum(weighted))
    ramp = np.abs(grid.nodes) > 0.25 * grid.period_l
    overflow = float(np.sum(weighted[ramp]) / total) if total > 0.0 else 0.0
    samples = _window(grid) * grid.nodes * fx
    return from_samples(grid, samples), overflow


def scaling_norms(
    params: AlphaParams,
    state: SimState,
    nl_eval,
) -> tuple[float, float]:
    """(Sobolev norm of S h at exponent N1*alpha, L2 norm of x d_x v).

    ``nl_eval`` maps a (real) height field to its nonlinearity; pass
    ``lambda h: zero_field(h.grid)`` for linear-only runs.
    """
    grid = state.v_hat.grid
    xdx_v, overflow = x_dx_windowed(state.v_hat)
    if overflow > LOCALIZATION_LIMIT:
        raise LocalizationError(
            f"{overflow:.1%} of |x v_x| mass lies outside the central "
            "half-cell; x-weighted norms are unreliable"
        )
    weighted_profile_norm = l2_norm(xdx_v)
    lam = dispersion(params, grid.freqs)
    h = SpectralField(grid, state.v_hat.coeffs * np.exp(1j * state.t * lam))
    nl = nl_eval(h)
    sh = SpectralField(
        grid,
        np.exp(1j * state.t * lam) * xdx_v.coeffs
        + (params.alpha * state.t) * nl.coeffs,
    )
    return sobolev_norm(params, sh, params.n1 * params.alpha), weighted_profile_norm


def decay_monitor(
    params: AlphaParams, bands: LPBandSet, h: SpectralField, ks=None
) -> dict[int, float]:
    """Per-band weighted sup norms (2^(k/2) + 2^(N2 alpha k)) ||P_k h||_inf."""
    out: dict[int, float] = {}
    for k in ks if ks is not None else range(bands.k_min, bands.k_max + 1):
        w = 2.0 ** (0.5 * k) + 2.0 ** (params.n2 * params.alpha * k)
        out[k] = float(w * np.max(np.abs(lp_project(bands, h, k).values())))
    return out


def bootstrap_composite(params: AlphaParams, rec: DiagnosticsRecord) -> float:
    """<t>^(-p0) [Sobolev + S-norm + weighted profile] + Z-norm."""
    return (1.0 + rec.t) ** (-params.p0) * (
        rec.sobolev_h_n0alpha + rec.s_norm_h_n1alpha + rec.weighted_profile_norm
    ) + rec.z_norm


def record_from_state(
    params: AlphaParams,
    state: SimState,
    nl_eval,
    bands: LPBandSet,
    band_ks=None,
) -> DiagnosticsRecord:
    """Assemble one full record from a simulation state."""
    grid = state.v_hat.grid
    lam = dispersion(params, grid.freqs)
    h = SpectralField(grid, state.v_hat.coeffs * np.exp(1j * state.t * lam))
    s_norm, weighted = scaling_norms(params, state, nl_eval)
    return DiagnosticsRecord(
        t=state.t,
        sobolev_h_n0alpha=sobolev_norm(params, h, params.n0 * params.alpha),
        s_norm_h_n1alpha=s_norm,
        weighted_profile_norm=weighted,
        z_norm=z_norm(params, state.v_hat),
        band_sup=decay_monitor(params, bands, h, ks=band_ks),
        linf_hx=float(np.max(np.abs(spectral_derivative(h).values()))),
        l2_h=l2_norm(h),
    )
