"""Time integration of the interface profile.

The stepper advances the profile v defined by h = exp(i t Lambda) v, so the
linear dispersive motion is applied exactly (integrating factor) and only
the nonlinearity is discretized, by classic RK4:

    d/dt vhat(xi) = exp(-i t Lambda(xi)) * F[N(exp(i t Lambda) v)](xi)

With the nonlinearity switched off the right-hand side is identically zero
and the profile is constant to the last bit.

Alongside the profile the stepper accumulates, per frequency, the
logarithmic phase

    L(xi, t) = c_tilde(xi) * integral_0^t |vhat(xi,s)|^2 / (s+1) ds

by the trapezoid rule, so scattering diagnostics never re-integrate
history.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, SpectralField, reality_defect
from .nonlinearity import NonlinearEvaluator, RegimeExitError
from .params import AlphaParams, dispersion, make_alpha_params
from .symbols import c_tilde

__all__ = [
    "BlowupError",
    "CheckpointError",
    "SimState",
    "StepperConfig",
    "Stepper",
    "parse_nl_mode",
    "save_checkpoint",
    "load_checkpoint",
]

_CKPT_MAGIC = b"GSQGCKPT"
_CKPT_VERSION = 1


class BlowupError(RuntimeError):
    """A coefficient became non-finite during integration."""

    def __init__(self, message: str, last_checkpoint: str | None = None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint


class CheckpointError(ValueError):
    """Malformed or incompatible checkpoint file."""


def parse_nl_mode(mode: str) -> tuple[str, int]:
    """Validate a nonlinearity mode string.

    Returns (kind, n_max) where kind is one of 'off', 'full',
    'cubic_only', 'series' and n_max is meaningful for 'series' only.
    """
    if mode in ("off", "full", "cubic_only"):
        return mode, 0
    if mode.startswith("series:"):
        try:
            n_max = int(mode.split(":", 1)[1])
        except ValueError:
            n_max = 0
        if 1 <= n_max <= 6:
            return "series", n_max
    raise ValueError(
        f"unknown nl_mode {mode!r}; expected off, full, cubic_only or series:k"
    )


@dataclass
class SimState:
    """Everything the stepper carries between steps."""

    t: float
    v_hat: SpectralField
    phase_l: np.ndarray
    step_count: int
    dt: float
    nl_mode: str


@dataclass(frozen=True)
class StepperConfig:
    dt_init: float
    max_t: float
    scheme: str = "if_rk4"
    safety: float = 1.0
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.dt_init == 0.0:
            raise ValueError("dt_init must be nonzero")
        if self.scheme != "if_rk4":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.safety <= 1.0:
            raise ValueError(f"safety must be in (0, 1]; got {self.safety!r}")


class Stepper:
    """Integrating-factor RK4 stepper bound to one grid and evaluator."""

    def __init__(
        self,
        params: AlphaParams,
        grid: Grid,
        cfg: StepperConfig,
        evaluator: NonlinearEvaluator | None = None,
    ):
        self.params = params
        self.grid = grid
        self.cfg = cfg
        self.evaluator = evaluator
        self.lam = dispersion(params, grid.freqs)
        self.c_tilde = c_tilde(params, grid.freqs)
        self.last_checkpoint: str | None = None

    def _nl_coeffs(self, kind: str, n_max: int, h: SpectralField) -> np.ndarray:
        ev = self.evaluator
        if ev is None:
            raise ValueError("nonlinear mode requires an evaluator")
        if kind == "full":
            return ev.eval_full(h).coeffs
        if kind == "cubic_only":
            return ev.eval_order_n(h, 1).coeffs
        return ev.eval_series(h, n_max).coeffs

    def rhs(self, t: float, v_coeffs: np.ndarray, nl_mode: str) -> np.ndarray:
        """Profile time derivative at time t."""
        kind, n_max = parse_nl_mode(nl_mode)
        if kind == "off":
            return np.zeros_like(v_coeffs)
        phase = np.exp(1j * t * self.lam)
        h = SpectralField(self.grid, v_coeffs * phase)
        out = np.conj(phase) * self._nl_coeffs(kind, n_max, h)
        out[self.grid.nyquist_index] = 0.0
        return out

    def step(self, state: SimState) -> SimState:
        """One RK4 step; returns the new state (input left untouched)."""
        t, dt = state.t, state.dt
        v = state.v_hat.coeffs
        f = lambda s, w: self.rhs(s, w, state.nl_mode)
        k1 = f(t, v)
        k2 = f(t + dt / 2.0, v + (dt / 2.0) * k1)
        k3 = f(t + dt / 2.0, v + (dt / 2.0) * k2)
        k4 = f(t + dt, v + dt * k3)
        v_new = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t + dt
        if not np.all(np.isfinite(v_new)):
            raise BlowupError(
                f"non-finite coefficient at t = {t_new:.6g} "
                f"(step {state.step_count + 1}); last checkpoint: "
                f"{self.last_checkpoint}",
                last_checkpoint=self.last_checkpoint,
            )
        phase_l = state.phase_l + (dt / 2.0) * self.c_tilde * (
            np.abs(v) ** 2 / (t + 1.0) + np.abs(v_new) ** 2 / (t_new + 1.0)
        )
        return SimState(
            t=t_new,
            v_hat=SpectralField(self.grid, v_new),
            phase_l=phase_l,
            step_count=state.step_count + 1,
            dt=dt,
            nl_mode=state.nl_mode,
        )

    def run(
        self,
        state: SimState,
        on_step=None,
        checkpoint_path: str | None = None,
    ) -> SimState:
        """Advance until cfg.max_t; optional per-step callback and checkpoints."""
        cfg = self.cfg
        direction = 1.0 if cfg.max_t >= state.t else -1.0
        if direction * state.dt <= 0.0:
            state = replace(state, dt=direction * abs(cfg.dt_init))
        while direction * (cfg.max_t - state.t) > 1e-12 * max(1.0, abs(cfg.max_t)):
            remaining = cfg.max_t - state.t
            if abs(remaining) < abs(state.dt):
                state = replace(state, dt=remaining)
            state = self.step(state)
            if (
                checkpoint_path
                and cfg.checkpoint_every > 0
                and state.step_count % cfg.checkpoint_every == 0
            ):
                save_checkpoint(checkpoint_path, self.params, state)
                self.last_checkpoint = checkpoint_path
            if on_step is not None:
                on_step(state)
        return state


def save_checkpoint(path: str, params: AlphaParams, state: SimState) -> None:
    """Versioned binary dump of the full state (profile, phase, clock)."""
    grid = state.v_hat.grid
    mode = state.nl_mode.encode()
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(
            struct.pack(
                "<IdddQdQI",
                _CKPT_VERSION,
                params.alpha,
                grid.period_l,
                state.t,
                grid.n_modes,
                state.dt,
                state.step_count,
                len(mode),
            )
        )
        fh.write(mode)
        fh.write(np.ascontiguousarray(state.v_hat.coeffs, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(state.phase_l, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> tuple[AlphaParams, SimState]:
    """Inverse of save_checkpoint; validates magic, version and sizes."""
    with open(path, "rb") as fh:
        if fh.read(8) != _CKPT_MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file")
        header = fh.read(struct.calcsize("<IdddQdQI"))
        version, alpha, period_l, t, n_modes, dt, step_count, mode_len = struct.unpack(
            "<IdddQdQI", header
        )
        if version != _CKPT_VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        nl_mode = fh.read(mode_len).decode()
        parse_nl_mode(nl_mode)
        n = int(n_modes)
        coeffs = np.frombuffer(fh.read(16 * n), dtype="<c16").astype(complex)
        phase_l = np.frombuffer(fh.read(8 * n), dtype="<f8").astype(float)
        if coeffs.shape != (n,) or phase_l.shape != (n,):
            raise CheckpointError(f"{path}: truncated payload")
    grid = Grid(period_l, n)
    state = SimState(
        t=t,
        v_hat=SpectralField(grid, coeffs),
        phase_l=phase_l,
        step_count=int(step_count),
        dt=dt,
        nl_mode=nl_mode,
    )
    return make_alpha_params(alpha), state
