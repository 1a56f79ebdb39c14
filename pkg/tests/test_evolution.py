"""Time integration: exactness, convergence order, reversibility, state IO."""

import numpy as np
import pytest

from gsqglab.evolution import (
    CheckpointError,
    SimState,
    Stepper,
    StepperConfig,
    load_checkpoint,
    parse_nl_mode,
    save_checkpoint,
)
from gsqglab.grid import Grid, from_samples
from gsqglab.nonlinearity import NonlinearEvaluator
from gsqglab.params import make_alpha_params
from gsqglab.quadrature import QuadratureSpec


def _setup(n_modes=256, period_l=20.0 * np.pi):
    p = make_alpha_params(1.5)
    g = Grid(period_l=period_l, n_modes=n_modes)
    q = QuadratureSpec(n_inner=96, n_outer=512, tail_rule="truncate_at_half_period")
    ev = NonlinearEvaluator(p, g, q)
    return p, g, ev


def _initial(g, amplitude=1e-2):
    return from_samples(g, amplitude * np.exp(-((g.nodes / 2.0) ** 2)))


def _state(g, f, dt, nl_mode="full"):
    return SimState(
        t=0.0,
        v_hat=f,
        phase_l=np.zeros(g.n_modes),
        step_count=0,
        dt=dt,
        nl_mode=nl_mode,
    )


def test_parse_nl_mode():
    assert parse_nl_mode("off") == ("off", 0)
    assert parse_nl_mode("full") == ("full", 0)
    assert parse_nl_mode("cubic_only") == ("cubic_only", 0)
    assert parse_nl_mode("series:3") == ("series", 3)
    for bad in ("series:0", "series:7", "quintic", ""):
        with pytest.raises(ValueError):
            parse_nl_mode(bad)


def test_linear_profile_exactly_constant():
    # With the nonlinearity off the integrating factor absorbs the entire
    # dynamics, so the profile must not move at all.
    p, g, ev = _setup()
    st = Stepper(p, g, StepperConfig(dt_init=0.1, max_t=1000.0), ev)
    s = _state(g, _initial(g), 0.1, nl_mode="off")
    v0 = s.v_hat.coeffs.copy()
    out = st.run(s)
    assert out.step_count == 10_000
    assert np.max(np.abs(out.v_hat.coeffs - v0)) <= 1e-14 * np.max(np.abs(v0))


def test_rk4_order_of_convergence():
    p, g, ev = _setup(n_modes=128)
    f = _initial(g, amplitude=0.05)
    T = 4.0

    def final(dt):
        st = Stepper(p, g, StepperConfig(dt_init=dt, max_t=T), ev)
        return st.run(_state(g, f.copy(), dt, nl_mode="cubic_only")).v_hat.coeffs

    ref = final(0.0125)
    errs = [np.linalg.norm(final(dt) - ref) for dt in (0.4, 0.2, 0.1)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.5), rates


def test_time_reversibility_cubic():
    p, g, ev = _setup()
    f = _initial(g)
    fwd = Stepper(p, g, StepperConfig(dt_init=0.05, max_t=10.0), ev)
    mid = fwd.run(_state(g, f.copy(), 0.05, nl_mode="cubic_only"))
    back = Stepper(p, g, StepperConfig(dt_init=-0.05, max_t=0.0), ev)
    out = back.run(mid)
    rel = np.linalg.norm(out.v_hat.coeffs - f.coeffs) / np.linalg.norm(f.coeffs)
    assert rel < 1e-6


def test_phase_accumulator_matches_quadrature():
    # For the linear flow |v| is constant, so the phase integral
    # c~ * |v|^2 * log(1+t) has a closed form to compare against.
    p, g, ev = _setup()
    st = Stepper(p, g, StepperConfig(dt_init=0.01, max_t=5.0), ev)
    s = _state(g, _initial(g), 0.01, nl_mode="off")
    out = st.run(s)
    expected = st.c_tilde * np.abs(s.v_hat.coeffs) ** 2 * np.log(1.0 + out.t)
    assert np.allclose(out.phase_l, expected, rtol=1e-4, atol=1e-12)


def test_checkpoint_roundtrip_exact(tmp_path):
    p, g, ev = _setup()
    st = Stepper(p, g, StepperConfig(dt_init=0.1, max_t=2.0), ev)
    out = st.run(_state(g, _initial(g), 0.1, nl_mode="full"))
    path = tmp_path / "state.bin"
    save_checkpoint(str(path), p, out)
    p2, s2 = load_checkpoint(str(path))
    assert p2.alpha == p.alpha
    assert s2.t == out.t
    assert s2.step_count == out.step_count
    assert s2.nl_mode == out.nl_mode
    assert np.array_equal(s2.v_hat.coeffs, out.v_hat.coeffs)
    assert np.array_equal(s2.phase_l, out.phase_l)


def test_checkpoint_rejects_corrupt_file(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"not a checkpoint at all")
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))


def test_resume_matches_uninterrupted_run(tmp_path):
    # Dyadic dt keeps the time accumulation exact, so the resumed run can
    # be compared bit for bit.
    p, g, ev = _setup()
    f = _initial(g)
    straight = Stepper(p, g, StepperConfig(dt_init=0.125, max_t=4.0), ev).run(
        _state(g, f.copy(), 0.125, nl_mode="full")
    )
    half = Stepper(p, g, StepperConfig(dt_init=0.125, max_t=2.0), ev).run(
        _state(g, f.copy(), 0.125, nl_mode="full")
    )
    path = tmp_path / "mid.bin"
    save_checkpoint(str(path), p, half)
    _, resumed = load_checkpoint(str(path))
    done = Stepper(p, g, StepperConfig(dt_init=0.125, max_t=4.0), ev).run(resumed)
    assert np.array_equal(done.v_hat.coeffs, straight.v_hat.coeffs)
