"""Run configuration: one TOML file, strictly validated.

Unknown keys anywhere in the file are hard errors -- a silently ignored
typo in ``alpha`` or ``amplitude`` would invalidate an experiment.  The
full schema is documented in the README and mirrored by the dataclasses
below.
"""

from __future__ import annotations

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

import numpy as np

from .evolution import StepperConfig, parse_nl_mode
from .grid import Grid, SpectralField, from_samples
from .params import AlphaParams, make_alpha_params
from .quadrature import QuadratureSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "initial_field"]


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


@dataclass(frozen=True)
class InitialData:
    kind: str
    amplitude: float = 0.01
    width: float = 2.0
    seed: int = 0
    n_waves: int = 3
    path: str = ""


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    grid: Grid
    initial_data: InitialData
    stepper: StepperConfig
    quadrature: QuadratureSpec
    nl_mode: str = "full"
    diagnostics_cadence: int = 20
    output_dir: str = "out"
    active_xi: float | None = None
    track_modes: int = 4
    band_ks: tuple[int, ...] = (-5, -4, -3, -2, -1, 0)


def _take(table: dict, where: str, spec: dict) -> dict:
    """Pop known keys with type coercion; any leftovers are errors."""
    out = {}
    for key, caster in spec.items():
        if key in table:
            raw = table.pop(key)
            try:
                out[key] = caster(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}.{key}: bad value {raw!r} ({exc})")
    if table:
        unknown = ", ".join(sorted(table))
        raise ConfigError(f"unknown key(s) in {where}: {unknown}")
    return out


def load_config(path: str) -> RunConfig:
    """Parse and validate a run configuration file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML: {exc}")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration: {exc}")

    grid_tbl = raw.pop("grid", None)
    if not isinstance(grid_tbl, dict):
        raise ConfigError("missing required [grid] table")
    grid_kw = _take(dict(grid_tbl), "grid", {"period_l": float, "n_modes": int})
    for need in ("period_l", "n_modes"):
        if need not in grid_kw:
            raise ConfigError(f"grid.{need} is required")

    init_tbl = dict(raw.pop("initial_data", {"kind": "gaussian_bump"}))
    init_kw = _take(
        init_tbl,
        "initial_data",
        {
            "kind": str,
            "amplitude": float,
            "width": float,
            "seed": int,
            "n_waves": int,
            "path": str,
        },
    )
    if init_kw.get("kind") not in ("gaussian_bump", "multi_mode", "from_file"):
        raise ConfigError(
            f"initial_data.kind must be gaussian_bump, multi_mode or "
            f"from_file; got {init_kw.get('kind')!r}"
        )

    step_tbl = dict(raw.pop("stepper", {}))
    step_kw = _take(
        step_tbl,
        "stepper",
        {
            "dt_init": float,
            "max_t": float,
            "scheme": str,
            "safety": float,
            "checkpoint_every": int,
        },
    )
    for need in ("dt_init", "max_t"):
        if need not in step_kw:
            raise ConfigError(f"stepper.{need} is required")

    quad_tbl = dict(raw.pop("quadrature", {}))
    quad_kw = _take(
        quad_tbl,
        "quadrature",
        {
            "inner_cut": float,
            "n_inner": int,
            "n_outer": int,
            "tail_rule": str,
            "n_images": int,
        },
    )

    top_kw = _take(
        raw,
        "top level",
        {
            "alpha": float,
            "nl_mode": str,
            "diagnostics_cadence": int,
            "output_dir": str,
            "active_xi": float,
            "track_modes": int,
            "band_ks": lambda v: tuple(int(k) for k in v),
        },
    )
    if "alpha" not in top_kw:
        raise ConfigError("alpha is required")

    try:
        make_alpha_params(top_kw["alpha"])
        grid = Grid(**grid_kw)
        stepper = StepperConfig(**step_kw)
        quad = QuadratureSpec(**quad_kw)
        quad.validate(grid)
        parse_nl_mode(top_kw.get("nl_mode", "full"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc))

    cadence = top_kw.get("diagnostics_cadence", 20)
    if cadence < 1:
        raise ConfigError(f"diagnostics_cadence must be >= 1; got {cadence}")

    return RunConfig(
        alpha=top_kw["alpha"],
        grid=grid,
        initial_data=InitialData(**init_kw),
        stepper=stepper,
        quadrature=quad,
        nl_mode=top_kw.get("nl_mode", "full"),
        diagnostics_cadence=cadence,
        output_dir=top_kw.get("output_dir", "out"),
        active_xi=top_kw.get("active_xi"),
        track_modes=top_kw.get("track_modes", 4),
        band_ks=top_kw.get("band_ks", (-5, -4, -3, -2, -1, 0)),
    )


def initial_field(cfg: RunConfig) -> SpectralField:
    """Build the initial height field described by the config."""
    init = cfg.initial_data
    grid = cfg.grid
    x = grid.nodes
    if init.kind == "gaussian_bump":
        samples = init.amplitude * np.exp(-(x**2) / (2.0 * init.width**2))
    elif init.kind == "multi_mode":
        rng = np.random.default_rng(init.seed)
        ks = rng.integers(1, max(2, grid.n_modes // 8), size=init.n_waves)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=init.n_waves)
        samples = np.zeros_like(x)
        for k, ph in zip(ks, phases):
            samples += np.cos(grid.dxi * int(k) * x + ph)
        samples *= init.amplitude
    else:
        try:
            samples = np.load(init.path)
        except OSError as exc:
            raise ConfigError(f"initial_data.path: {exc}")
        if samples.shape != (grid.n_modes,):
            raise ConfigError(
                f"initial_data file has shape {samples.shape}; "
                f"expected ({grid.n_modes},)"
            )
        samples = np.asarray(samples, dtype=float)
    return from_samples(grid, samples)
