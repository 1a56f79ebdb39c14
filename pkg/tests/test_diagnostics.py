"""Monitored norms: closed-form checks and consistency with the equation."""

import numpy as np
import pytest

from gsqglab.bands import bands_for_grid
from gsqglab.diagnostics import (
    LOCALIZATION_LIMIT,
    LocalizationError,
    bootstrap_composite,
    decay_monitor,
    record_from_state,
    scaling_norms,
    sobolev_norm,
    x_dx_windowed,
    z_norm,
)
from gsqglab.evolution import SimState
from gsqglab.grid import Grid, from_samples, l2_norm, spectral_derivative
from gsqglab.nonlinearity import NonlinearEvaluator
from gsqglab.params import make_alpha_params
from gsqglab.quadrature import QuadratureSpec


def _gaussian(g, amplitude=0.01, width=2.0):
    return from_samples(g, amplitude * np.exp(-(g.nodes**2) / (2.0 * width**2)))


def test_sobolev_zero_exponent_is_l2():
    p = make_alpha_params(1.5)
    g = Grid(period_l=40.0 * np.pi, n_modes=512)
    f = _gaussian(g)
    assert sobolev_norm(p, f, 0.0) == pytest.approx(l2_norm(f), rel=1e-10)


def test_sobolev_gaussian_against_continuum_integral():
    from scipy.integrate import quad

    p = make_alpha_params(1.5)
    g = Grid(period_l=200.0 * np.pi, n_modes=4096)
    f = _gaussian(g, amplitude=0.01, width=2.0)
    s = p.n0 * p.alpha
    # Continuum transform of a*exp(-x^2/(2 w^2)) is a*w*sqrt(2 pi)*exp(-w^2 xi^2/2).
    a, w = 0.01, 2.0
    integrand = lambda xi: (1 + xi * xi) ** s * (
        a * w * np.sqrt(2 * np.pi) * np.exp(-0.5 * w * w * xi * xi)
    ) ** 2 / (2 * np.pi)
    exact = np.sqrt(2.0 * quad(integrand, 0, 20.0, limit=300)[0])
    assert sobolev_norm(p, f, s) == pytest.approx(exact, rel=1e-5)


def test_z_norm_single_mode_closed_form():
    # A single mode of amplitude a at |xi| = 1 carries weight 1 + 1 = 2.
    p = make_alpha_params(1.5)
    g = Grid(period_l=2.0 * np.pi * 10, n_modes=256)
    a = 3e-3
    k = 10  # xi = k * dxi = 1.0
    f = from_samples(g, a * np.cos(g.dxi * k * g.nodes))
    assert z_norm(p, f) == pytest.approx(2.0 * (a / 2.0), rel=1e-10)


def test_z_norm_ignores_roundoff_floor():
    p = make_alpha_params(1.5)
    g = Grid(period_l=2.0 * np.pi * 10, n_modes=256)
    f = from_samples(g, 1e-3 * np.cos(g.dxi * 10 * g.nodes))
    # Inject coefficient noise far below the documented measurement floor.
    noisy = f.copy()
    rng = np.random.default_rng(0)
    noisy.coeffs += 1e-18 * rng.standard_normal(g.n_modes)
    assert z_norm(p, noisy) == pytest.approx(z_norm(p, f), rel=1e-6)


def test_x_dx_windowed_matches_identity_for_centered_field():
    g = Grid(period_l=80.0 * np.pi, n_modes=1024)
    f = _gaussian(g, width=2.0)
    out, overflow = x_dx_windowed(f)
    assert overflow < LOCALIZATION_LIMIT
    fx = spectral_derivative(f).values()
    assert np.allclose(out.values(), g.nodes * fx, atol=1e-12)


def test_scaling_norm_at_time_zero_matches_x_derivative():
    # At t = 0 the scaling field acting on h reduces to x * h_x plus the
    # t-weighted nonlinearity, which vanishes; compare against x h0'.
    p = make_alpha_params(1.5)
    g = Grid(period_l=80.0 * np.pi, n_modes=1024)
    q = QuadratureSpec(n_inner=96, n_outer=512, tail_rule="truncate_at_half_period")
    ev = NonlinearEvaluator(p, g, q)
    f = _gaussian(g)
    state = SimState(
        t=0.0, v_hat=f, phase_l=np.zeros(g.n_modes), step_count=0, dt=0.1,
        nl_mode="full",
    )
    sh_norm, xdx_l2 = scaling_norms(p, state, ev.eval_full)
    direct = from_samples(g, g.nodes * spectral_derivative(f).values())
    assert sh_norm == pytest.approx(
        sobolev_norm(p, direct, p.n1 * p.alpha), rel=1e-8
    )
    assert xdx_l2 == pytest.approx(l2_norm(direct), rel=1e-8)


def test_localization_guard_trips_on_edge_mass():
    g = Grid(period_l=80.0 * np.pi, n_modes=1024)
    edge = from_samples(
        g, np.exp(-((np.abs(g.nodes) - 0.49 * g.period_l) ** 2))
    )
    with pytest.raises(LocalizationError):
        p = make_alpha_params(1.5)
        state = SimState(
            t=0.0, v_hat=edge, phase_l=np.zeros(g.n_modes), step_count=0,
            dt=0.1, nl_mode="off",
        )
        scaling_norms(p, state, None)


def test_decay_monitor_reports_band_sups():
    p = make_alpha_params(1.5)
    g = Grid(period_l=40.0 * np.pi, n_modes=512)
    bands = bands_for_grid(g)
    f = _gaussian(g)
    sups = decay_monitor(p, bands, f, (-2, -1, 0))
    assert set(sups) == {-2, -1, 0}
    assert all(v >= 0.0 for v in sups.values())


def test_record_and_composite():
    p = make_alpha_params(1.5)
    g = Grid(period_l=80.0 * np.pi, n_modes=1024)
    q = QuadratureSpec(n_inner=96, n_outer=512, tail_rule="truncate_at_half_period")
    ev = NonlinearEvaluator(p, g, q)
    f = _gaussian(g)
    state = SimState(
        t=2.0, v_hat=f, phase_l=np.zeros(g.n_modes), step_count=5, dt=0.4,
        nl_mode="full",
    )
    bands = bands_for_grid(g)
    rec = record_from_state(p, state, ev.eval_full, bands, (-1, 0))
    assert rec.t == 2.0
    assert rec.z_norm > 0.0
    assert rec.l2_h == pytest.approx(l2_norm(f), rel=1e-12)
    assert bootstrap_composite(p, rec) >= rec.sobolev_h_n0alpha
