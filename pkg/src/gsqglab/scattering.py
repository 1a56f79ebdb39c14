"""Resonance analysis and modified-scattering measurements.

The cubic interaction at frequency xi couples triples (eta1, eta2,
xi - eta1 - eta2) through the oscillatory phase

    Phi = -Lambda(xi) + Lambda(eta1) + Lambda(eta2) + Lambda(xi - eta1 - eta2).

Spacetime resonances are joint zeros of Phi and its eta-gradient; for an
odd power-law dispersion they reduce to the three points (eta1, eta2) in
{(xi, xi), (xi, -xi), (-xi, xi)}, which is what forces the logarithmic
phase correction of the profile at late times.  This module finds those
points by brute force (no analytic shortcut, so the count is a genuine
check), applies the phase correction, and measures linear dispersive
decay per frequency band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import bands_for_grid, lp_project
from .evolution import SimState
from .grid import Grid, SpectralField, propagate
from .params import AlphaParams, dispersion
from .symbols import m1_cube

__all__ = [
    "ResonancePoint",
    "CorrectedProfile",
    "DecayFit",
    "ResolutionError",
    "phase_phi",
    "phase_phi_grad",
    "find_resonances",
    "c_tilde",
    "corrected_profile",
    "phase_variance",
    "dispersive_decay_experiment",
]


class ResolutionError(ValueError):
    """A requested band cannot be represented on an affordable grid."""


@dataclass(frozen=True)
class ResonancePoint:
    xi: float
    eta1: float
    eta2: float
    phi_value: float
    grad_norm: float


@dataclass(frozen=True)
class CorrectedProfile:
    """Profile after the unimodular correction exp(i L(xi, t))."""

    v_star_hat: np.ndarray
    t: float


@dataclass(frozen=True)
class DecayFit:
    """Result of a per-band linear decay experiment."""

    band_k: int
    t_list: np.ndarray
    sup_norms: np.ndarray
    slope: float
    prefactor: float


def phase_phi(params: AlphaParams, xi, eta1, eta2):
    """Interaction phase -Lambda(xi) + Lambda(eta1) + Lambda(eta2) + Lambda(eta3)."""
    eta3 = xi - eta1 - eta2
    return (
        -dispersion(params, xi)
        + dispersion(params, eta1)
        + dispersion(params, eta2)
        + dispersion(params, eta3)
    )


def _group_velocity(params: AlphaParams, xi):
    """d Lambda / d xi = gamma * alpha * |xi|^(alpha-1) (even in xi)."""
    return params.gamma * params.alpha * np.abs(xi) ** (params.alpha - 1.0)


def phase_phi_grad(params: AlphaParams, xi, eta1, eta2):
    """Gradient of phase_phi with respect to (eta1, eta2)."""
    eta3 = xi - eta1 - eta2
    g3 = _group_velocity(params, eta3)
    return (
        _group_velocity(params, eta1) - g3,
        _group_velocity(params, eta2) - g3,
    )


def _lambda_dd(params: AlphaParams, xi):
    """Second derivative of the dispersion relation (odd, singular at 0)."""
    a = params.alpha
    return params.gamma * a * (a - 1.0) * np.sign(xi) * np.abs(xi) ** (a - 2.0)


def find_resonances(
    params: AlphaParams,
    xi: float,
    search_box: float = 3.0,
    tol: float = 1e-6,
    n_grid: int = 400,
) -> list[ResonancePoint]:
    """Brute-force search for joint zeros of (Phi, dPhi/deta1, dPhi/deta2).

    Scans an n_grid x n_grid lattice on [-b, b]^2 with b = search_box*|xi|,
    Newton-refines the most promising cells on the gradient system, keeps
    refined points whose scale-free residual

        (|Phi| + |xi|*(|dPhi/deta1| + |dPhi/deta2|)) / |Lambda(xi)|

    falls below ``tol``, and merges duplicates into clusters.  Returns one
    representative per cluster, sorted by (eta1, eta2).
    """
    if xi == 0.0:
        raise ValueError("resonance search requires xi != 0")
    scale = abs(dispersion(params, xi))
    b = search_box * abs(xi)
    axis = np.linspace(-b, b, n_grid)
    e1, e2 = np.meshgrid(axis, axis, indexing="ij")

    def residual(p1, p2):
        g1, g2 = phase_phi_grad(params, xi, p1, p2)
        return (
            np.abs(phase_phi(params, xi, p1, p2))
            + abs(xi) * (np.abs(g1) + np.abs(g2))
        ) / scale

    res = residual(e1, e2)
    order = np.argsort(res, axis=None)[: 4 * n_grid]

    clusters: list[ResonancePoint] = []
    cluster_r = max(1e-3, 100.0 * tol) * abs(xi)
    for flat in order:
        p1, p2 = float(e1.flat[flat]), float(e2.flat[flat])
        ok = True
        for _ in range(50):
            eta3 = xi - p1 - p2
            if p1 == 0.0 or p2 == 0.0 or eta3 == 0.0:
                ok = False
                break
            g = np.array(phase_phi_grad(params, xi, p1, p2))
            d1 = _lambda_dd(params, p1)
            d2 = _lambda_dd(params, p2)
            d3 = _lambda_dd(params, eta3)
            jac = np.array([[d1 + d3, d3], [d3, d2 + d3]])
            try:
                step = np.linalg.solve(jac, g)
            except np.linalg.LinAlgError:
                ok = False
                break
            limit = 0.25 * abs(xi)
            norm = np.hypot(step[0], step[1])
            if norm > limit:
                step *= limit / norm
            p1, p2 = p1 - step[0], p2 - step[1]
            if norm < 1e-14 * abs(xi):
                break
        if not ok or max(abs(p1), abs(p2)) > 1.5 * b:
            continue
        r = float(residual(p1, p2))
        if r >= tol:
            continue
        for c in clusters:
            if np.hypot(p1 - c.eta1, p2 - c.eta2) < cluster_r:
                break
        else:
            g1, g2 = phase_phi_grad(params, xi, p1, p2)
            clusters.append(
                ResonancePoint(
                    xi=xi,
                    eta1=p1,
                    eta2=p2,
                    phi_value=float(phase_phi(params, xi, p1, p2)),
                    grad_norm=float(np.hypot(g1, g2)),
                )
            )
    return sorted(clusters, key=lambda c: (c.eta1, c.eta2))


def c_tilde(params: AlphaParams, xi, m1_eval=None):
    """Log-phase rate coefficient: -K_alpha |xi|^(2-alpha) m1(xi,xi,-xi).

    ``m1_eval`` defaults to the closed-form symbol; pass another evaluator
    (table, oscillatory) to propagate its accuracy instead.  See
    :func:`gsqglab.symbols.c_tilde` for the stationary-phase reasoning
    behind the single symbol evaluation.
    """
    if m1_eval is None:
        m1_eval = lambda l1, l2, l3: m1_cube(params, l1, l2, l3)
    xi_arr = np.asarray(xi, dtype=float)
    m_res = np.asarray(m1_eval(xi_arr, xi_arr, -xi_arr))
    out = -params.k_alpha * np.abs(xi_arr) ** (2.0 - params.alpha) * m_res
    return out if out.ndim else float(out)


def corrected_profile(state: SimState) -> CorrectedProfile:
    """Apply the accumulated logarithmic phase: v* = vhat * exp(i L)."""
    return CorrectedProfile(
        v_star_hat=state.v_hat.coeffs * np.exp(1j * state.phase_l),
        t=state.t,
    )


def phase_variance(values: np.ndarray) -> float:
    """Variance of the unwrapped complex argument along a trajectory."""
    values = np.asarray(values)
    return float(np.var(np.unwrap(np.angle(values))))


def _band_support(k: int) -> tuple[float, float]:
    # Support of the band-k cutoff: [1.25 * 2^(k-1), 1.6 * 2^k].
    return 0.625 * 2.0**k, 1.6 * 2.0**k


# The stationary-phase picture behind the t^(-1/2) rate holds once the
# rescaled time tau = t * 2^(alpha k) clears an order-one threshold; below
# it the packet has simply not started to spread.  The fit masks those
# early points out when at least one decade of later data remains.
TAU_ONSET = 10.0


def decay_time_grid(params: AlphaParams, k: int, n_points: int = 41) -> np.ndarray:
    """Log-spaced times covering [10, 1000] plus, for low bands, enough
    post-onset decades for a stable exponent fit."""
    t_on = TAU_ONSET * 2.0 ** (-params.alpha * k)
    return np.geomspace(10.0, max(1000.0, 300.0 * t_on), n_points)


def dispersive_decay_experiment(
    params: AlphaParams,
    k: int,
    t_list,
    n_max: int = 1 << 21,
) -> DecayFit:
    """Sup-norm decay of the free evolution of a band-k wave packet.

    The packet is the band cutoff itself in frequency (hat f_k(xi) =
    phi_k(xi), normalized to unit L1 norm in x), so it is exactly
    self-similar across bands and the fitted prefactors isolate the
    2^(k(1-alpha/2)) band scaling.  The grid is sized from the spread of
    group velocities over the band so that periodic wrap-around stays out
    of the picture for every requested time.  The exponent is fitted on
    the post-onset points (tau = t * 2^(alpha k) >= TAU_ONSET) whenever a
    decade of them is available, on all points otherwise.
    """
    t_list = np.sort(np.asarray(t_list, dtype=float))
    xi_lo, xi_hi = _band_support(k)
    t_max = t_list[-1]
    v_spread = _group_velocity(params, xi_hi) - _group_velocity(params, xi_lo)
    width0 = 40.0 / 2.0**k  # initial packet footprint
    period_l = 1.35 * (v_spread * t_max + width0)
    # Resolve the top of the band with margin, and the packet in x.
    n_modes = 1 << int(np.ceil(np.log2(period_l * 2.5 * xi_hi / np.pi)))
    n_modes = max(n_modes, 1024)
    if n_modes > n_max:
        raise ResolutionError(
            f"band k={k} out to t={t_max:g} needs {n_modes} modes "
            f"(cap {n_max}); shrink the time range"
        )
    grid = Grid(period_l, n_modes)
    bands = bands_for_grid(grid)
    f = lp_project(
        bands, SpectralField(grid, np.ones(n_modes, dtype=complex)), k
    )
    l1 = np.sum(np.abs(f.values())) * grid.dx
    f = SpectralField(grid, f.coeffs / l1)

    sups = np.empty_like(t_list)
    for i, t in enumerate(t_list):
        sups[i] = np.max(np.abs(propagate(params, f, t).values()))
    mask = t_list * 2.0 ** (params.alpha * k) >= TAU_ONSET
    if mask.sum() < 2 or t_list[mask][-1] < 10.0 * t_list[mask][0]:
        mask = np.ones_like(mask)
    slope = float(np.polyfit(np.log(t_list[mask]), np.log(sups[mask]), 1)[0])
    band_weight = 2.0 ** (k * (1.0 - params.alpha / 2.0))
    prefactor = float(
        np.median((sups * np.sqrt(t_list))[mask]) / band_weight
    )
    return DecayFit(
        band_k=k,
        t_list=t_list,
        sup_norms=sups,
        slope=slope,
        prefactor=prefactor,
    )
