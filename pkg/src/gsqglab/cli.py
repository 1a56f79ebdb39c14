"""Command-line entry points and deterministic artifact writers.

Subcommands: simulate, symbols, dispersive, resonances.  Exit codes:
0 success, 2 configuration error, 3 runtime blowup / regime exit,
4 verification failure (a checked scientific property did not hold).

All CSV files start with a schema-version comment line and a header row;
floats are written with their shortest round-trip representation, so a
rerun of the same configuration is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bands import bands_for_grid
from .config import ConfigError, RunConfig, initial_field, load_config
from .diagnostics import (
    DiagnosticsRecord,
    LocalizationError,
    bootstrap_composite,
    record_from_state,
)
from .evolution import (
    BlowupError,
    CheckpointError,
    SimState,
    Stepper,
    load_checkpoint,
    parse_nl_mode,
    save_checkpoint,
)
from .grid import GridError, SpectralField, zero_field
from .kernels import BACKEND
from .nonlinearity import NonlinearEvaluator, RegimeExitError
from .params import DomainError, dispersion, make_alpha_params
from .quadrature import QuadratureSpecError
from .scattering import (
    c_tilde,
    corrected_profile,
    decay_time_grid,
    dispersive_decay_experiment,
    find_resonances,
)
from .symbols import QuadratureAccuracyError, m1_cube, m1_oscillatory

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_VERIFY = 4

DIAG_SCHEMA = "gsqglab.diagnostics.v1"
PHASE_SCHEMA = "gsqglab.phases.v1"
SYMBOL_SCHEMA = "gsqglab.symbols.v1"
CTILDE_SCHEMA = "gsqglab.c_tilde.v1"
DECAY_SCHEMA = "gsqglab.decay.v1"
RESONANCE_SCHEMA = "gsqglab.resonances.v1"

_CONFIG_ERRORS = (
    ConfigError,
    DomainError,
    GridError,
    QuadratureSpecError,
    CheckpointError,
)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, schema: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema={schema}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _record_row(rec: DiagnosticsRecord, composite: float, band_ks) -> list:
    row = [
        rec.t,
        rec.sobolev_h_n0alpha,
        rec.s_norm_h_n1alpha,
        rec.weighted_profile_norm,
        rec.z_norm,
        rec.linf_hx,
        rec.l2_h,
        composite,
    ]
    row.extend(rec.band_sup[k] for k in band_ks)
    return row


def _tracked_modes(params, grid, v0: SpectralField, n_track: int) -> list[int]:
    """Indices of the positive frequencies with the largest expected phase
    drift |c_tilde(xi)| |vhat(xi,0)|^2."""
    xi = grid.freqs
    score = np.abs(c_tilde(params, np.where(xi > 0, xi, 1.0)))
    score *= (xi > 0) * np.abs(v0.coeffs) ** 2
    order = np.argsort(score)[::-1]
    return [int(i) for i in order[:n_track]]


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out_dir = args.output or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    params = make_alpha_params(cfg.alpha)
    grid = cfg.grid
    kind, _ = parse_nl_mode(cfg.nl_mode)

    if args.resume:
        ck_params, state = load_checkpoint(args.resume)
        if abs(ck_params.alpha - cfg.alpha) > 1e-12:
            raise ConfigError(
                f"checkpoint alpha {ck_params.alpha} != config alpha {cfg.alpha}"
            )
        if (
            state.v_hat.grid.n_modes != grid.n_modes
            or abs(state.v_hat.grid.period_l - grid.period_l) > 1e-9
        ):
            raise ConfigError("checkpoint grid does not match config grid")
        state = SimState(
            t=state.t,
            v_hat=state.v_hat,
            phase_l=state.phase_l,
            step_count=state.step_count,
            dt=cfg.stepper.dt_init,
            nl_mode=cfg.nl_mode,
        )
    else:
        h0 = initial_field(cfg)
        state = SimState(
            t=0.0,
            v_hat=h0,
            phase_l=np.zeros(grid.n_modes),
            step_count=0,
            dt=cfg.stepper.dt_init,
            nl_mode=cfg.nl_mode,
        )

    evaluator = None
    if kind != "off":
        evaluator = NonlinearEvaluator(
            params, grid, cfg.quadrature, active_xi=cfg.active_xi
        )
        # One-time quadrature self-check on the initial data.
        evaluator.eval_full(
            SpectralField(
                grid,
                state.v_hat.coeffs
                * np.exp(1j * state.t * dispersion(params, grid.freqs)),
            ),
            check=True,
        )
        nl_eval = lambda h: evaluator.eval_full(h)
    else:
        nl_eval = lambda h: zero_field(h.grid)

    bands = bands_for_grid(grid)
    band_ks = [k for k in cfg.band_ks if bands.k_min <= k <= bands.k_max]
    tracked = _tracked_modes(params, grid, state.v_hat, cfg.track_modes)

    manifest = {
        "schema": {
            "diagnostics": DIAG_SCHEMA,
            "phases": PHASE_SCHEMA,
        },
        "backend": BACKEND,
        "config_file": os.path.basename(args.config),
        "alpha": params.alpha,
        "gamma": params.gamma,
        "beta": params.beta,
        "p0": params.p0,
        "n0": params.n0,
        "n1": params.n1,
        "n2": params.n2,
        "d1": params.d1,
        "k_alpha": params.k_alpha,
        "c_tilde_at_1": c_tilde(params, 1.0),
        "grid": {"period_l": grid.period_l, "n_modes": grid.n_modes},
        "nl_mode": cfg.nl_mode,
        "dt": cfg.stepper.dt_init,
        "max_t": cfg.stepper.max_t,
        "diagnostics_cadence": cfg.diagnostics_cadence,
        "band_ks": band_ks,
        "tracked_xi": [grid.freqs[i] for i in tracked],
        "quadrature": {
            "inner_cut": cfg.quadrature.inner_cut,
            "n_inner": cfg.quadrature.n_inner,
            "n_outer": cfg.quadrature.n_outer,
            "tail_rule": cfg.quadrature.tail_rule,
            "n_images": cfg.quadrature.n_images,
            "active_xi": cfg.active_xi,
        },
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    diag_header = [
        "t",
        "sobolev_h_n0alpha",
        "s_norm_h_n1alpha",
        "weighted_profile_norm",
        "z_norm",
        "linf_hx",
        "l2_h",
        "bootstrap_composite",
    ] + [f"band_sup_{k}" for k in band_ks]
    phase_header = ["t", "xi", "abs_v", "arg_raw", "arg_corrected"]

    diag_rows: list[list] = []
    phase_rows: list[list] = []

    def record(st: SimState) -> None:
        rec = record_from_state(params, st, nl_eval, bands, band_ks=band_ks)
        diag_rows.append(_record_row(rec, bootstrap_composite(params, rec), band_ks))
        star = corrected_profile(st)
        for i in tracked:
            v = st.v_hat.coeffs[i]
            phase_rows.append(
                [
                    st.t,
                    float(grid.freqs[i]),
                    float(np.abs(v)),
                    float(np.angle(v)),
                    float(np.angle(star.v_star_hat[i])),
                ]
            )

    record(state)
    stepper = Stepper(params, grid, cfg.stepper, evaluator)
    cadence = cfg.diagnostics_cadence

    def on_step(st: SimState) -> None:
        if st.step_count % cadence == 0:
            record(st)

    ckpt = os.path.join(out_dir, "checkpoint.bin")
    state = stepper.run(state, on_step=on_step, checkpoint_path=ckpt)
    if state.step_count % cadence != 0:
        record(state)
    save_checkpoint(ckpt, params, state)

    _write_csv(os.path.join(out_dir, "diagnostics.csv"), DIAG_SCHEMA, diag_header, diag_rows)
    _write_csv(os.path.join(out_dir, "phases.csv"), PHASE_SCHEMA, phase_header, phase_rows)
    return EXIT_OK


def cmd_symbols(args) -> int:
    params = make_alpha_params(args.alpha)
    out_dir = args.output
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(20240813)
    rows = []
    worst = 0.0
    for _ in range(args.n_triples):
        lam = rng.uniform(-4.0, 4.0, size=3)
        lam[np.abs(lam) < 0.1] += 0.2 * np.sign(lam[np.abs(lam) < 0.1] + 0.5)
        cube = m1_cube(params, *lam)
        osc = m1_oscillatory(params, *lam)
        rel = abs(cube - osc) / max(abs(cube), 1e-300)
        worst = max(worst, rel)
        rows.append([params.alpha, lam[0], lam[1], lam[2], cube, osc, rel])
    _write_csv(
        os.path.join(out_dir, "symbols.csv"),
        SYMBOL_SCHEMA,
        ["alpha", "l1", "l2", "l3", "m1_cube", "m1_osc", "rel_diff"],
        rows,
    )
    xi_grid = np.geomspace(0.05, 20.0, 25)
    _write_csv(
        os.path.join(out_dir, "c_tilde.csv"),
        CTILDE_SCHEMA,
        ["xi", "c_tilde"],
        [[float(x), c_tilde(params, float(x))] for x in xi_grid],
    )
    if worst > 1e-4:
        print(f"symbol oracle disagreement: {worst:.3e} > 1e-4", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_dispersive(args) -> int:
    params = make_alpha_params(args.alpha)
    out_dir = args.output
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    fits = {}
    for k in args.bands:
        fit = dispersive_decay_experiment(params, k, decay_time_grid(params, k))
        fits[k] = fit
        for t, s in zip(fit.t_list, fit.sup_norms):
            rows.append([float(t), k, float(s)])
    _write_csv(
        os.path.join(out_dir, "decay.csv"),
        DECAY_SCHEMA,
        ["t", "band", "sup_norm"],
        rows,
    )
    manifest = {
        "alpha": params.alpha,
        "schema": {"decay": DECAY_SCHEMA},
        "slopes": {str(k): fits[k].slope for k in args.bands},
        "prefactors": {str(k): fits[k].prefactor for k in args.bands},
    }
    with open(os.path.join(out_dir, "decay_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    bad = {k: f.slope for k, f in fits.items() if abs(f.slope + 0.5) > 0.05}
    if bad:
        print(f"decay slope out of tolerance: {bad}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_resonances(args) -> int:
    params = make_alpha_params(args.alpha)
    out_dir = args.output
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    ok = True
    for xi in args.xi:
        points = find_resonances(params, xi)
        for pt in points:
            rows.append([xi, pt.eta1, pt.eta2, pt.phi_value, pt.grad_norm])
        if len(points) != 3:
            print(
                f"xi={xi}: found {len(points)} resonance clusters, expected 3",
                file=sys.stderr,
            )
            ok = False
    _write_csv(
        os.path.join(out_dir, "resonances.csv"),
        RESONANCE_SCHEMA,
        ["xi", "eta1", "eta2", "phi", "grad_norm"],
        rows,
    )
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsqglab",
        description="Pseudo-spectral laboratory for a fractional "
        "dispersive interface equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a time integration")
    p_sim.add_argument("--config", required=True, help="TOML run configuration")
    p_sim.add_argument("--output", default=None, help="artifact directory")
    p_sim.add_argument("--resume", default=None, help="checkpoint to resume from")
    p_sim.set_defaults(func=cmd_simulate)

    p_sym = sub.add_parser("symbols", help="tabulate the cubic symbol")
    p_sym.add_argument("--alpha", type=float, required=True)
    p_sym.add_argument("--output", default="out", help="artifact directory")
    p_sym.add_argument("--n-triples", type=int, default=20)
    p_sym.set_defaults(func=cmd_symbols)

    p_disp = sub.add_parser("dispersive", help="linear band decay experiment")
    p_disp.add_argument("--alpha", type=float, required=True)
    p_disp.add_argument("--output", default="out", help="artifact directory")
    p_disp.add_argument(
        "--bands", type=int, nargs="+", default=[-2, -1, 0, 1, 2, 3]
    )
    p_disp.set_defaults(func=cmd_dispersive)

    p_res = sub.add_parser("resonances", help="brute-force resonance search")
    p_res.add_argument("--alpha", type=float, required=True)
    p_res.add_argument("--output", default="out", help="artifact directory")
    p_res.add_argument("--xi", type=float, nargs="+", default=[1.0])
    p_res.set_defaults(func=cmd_resonances)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowupError, RegimeExitError, LocalizationError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except QuadratureAccuracyError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
