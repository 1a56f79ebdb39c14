"""Render figures from gsqglab CSV artifacts.

Each artifact starts with a ``# schema=<name>`` comment line followed by a
header row.  ``render`` validates the schema line against the requested
figure kind, reads the numeric columns, and writes a single image.  On any
validation error no output file is created.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_SCHEMA = {
    "decay": "gsqglab.decay.v1",
    "phase": "gsqglab.phases.v1",
    "norms": "gsqglab.diagnostics.v1",
    "symbols": "gsqglab.symbols.v1",
}

# Fallback growth exponent for the norms guide curve when no manifest is
# found next to the CSV (matches alpha = 1.5).
DEFAULT_P0 = 5e-09


class SchemaError(ValueError):
    """The CSV schema line does not match the requested figure kind."""


class CsvFormatError(ValueError):
    """The CSV is empty or structurally malformed."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: a CSV path, a figure kind, and an output path."""

    input_csv: str
    kind: str
    output: str

    def __post_init__(self):
        if self.kind not in EXPECTED_SCHEMA:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; "
                f"expected one of {sorted(EXPECTED_SCHEMA)}"
            )


def read_table(path: str, expected_schema: str) -> dict[str, np.ndarray]:
    """Read a schema-tagged CSV into a column-name -> float array mapping."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise SchemaError(f"{path}: missing '# schema=' comment line")
        schema = first[len("# schema=") :]
        if schema != expected_schema:
            raise SchemaError(
                f"{path}: schema {schema!r} does not match expected "
                f"{expected_schema!r}"
            )
        header_line = fh.readline().strip()
        if not header_line:
            raise CsvFormatError(f"{path}: missing header row")
        header = header_line.split(",")
        rows = []
        for line_no, line in enumerate(fh, start=3):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise CsvFormatError(
                    f"{path}:{line_no}: expected {len(header)} fields, "
                    f"got {len(parts)}"
                )
            rows.append([float(p) for p in parts])
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, j] for j, name in enumerate(header)}


def _require_columns(table: dict[str, np.ndarray], names: list[str], path: str):
    missing = [n for n in names if n not in table]
    if missing:
        raise CsvFormatError(f"{path}: missing columns {missing}")


def _slope_fit(log_t: np.ndarray, log_y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of log_y against log_t with a 95% half-width.

    The half-width uses the usual normal approximation
    1.96 * s / sqrt(sum (x - xbar)^2) with s the residual RMS.
    """
    coeffs, residuals, *_ = np.polyfit(log_t, log_y, 1, full=True)
    slope = float(coeffs[0])
    n = log_t.size
    if n > 2 and residuals.size:
        s2 = float(residuals[0]) / (n - 2)
        sxx = float(np.sum((log_t - log_t.mean()) ** 2))
        half = 1.96 * math.sqrt(s2 / sxx)
    else:
        half = 0.0
    return slope, half


def _sidecar_manifest(input_csv: str) -> dict:
    for name in ("manifest.json", "decay_manifest.json"):
        path = os.path.join(os.path.dirname(os.path.abspath(input_csv)), name)
        if os.path.exists(path):
            with open(path) as fh:
                return json.load(fh)
    return {}


def _render_decay(spec: FigureSpec) -> dict:
    table = read_table(spec.input_csv, EXPECTED_SCHEMA["decay"])
    _require_columns(table, ["t", "band", "sup_norm"], spec.input_csv)
    # Fit convention of the decay artifacts: low bands include pre-onset
    # times, and the published slope is fitted on the post-onset points
    # t * 2^(alpha k) >= 10 whenever a decade of them is available.  The
    # band's alpha comes from the sidecar manifest; without it all points
    # are used.
    alpha = _sidecar_manifest(spec.input_csv).get("alpha")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    slopes: dict[int, float] = {}
    half_widths: dict[int, float] = {}
    bands = np.unique(table["band"]).astype(int)
    for k in bands:
        sel = table["band"].astype(int) == k
        t = table["t"][sel]
        sup = table["sup_norm"][sel]
        order = np.argsort(t)
        t, sup = t[order], sup[order]
        pos = sup > 0
        t, sup = t[pos], sup[pos]
        if alpha is not None:
            mask = t * 2.0 ** (float(alpha) * int(k)) >= 10.0
            if mask.sum() < 2 or t[mask][-1] < 10.0 * t[mask][0]:
                mask = np.ones_like(mask)
            t_fit, sup_fit = t[mask], sup[mask]
        else:
            t_fit, sup_fit = t, sup
        slope, half = _slope_fit(np.log(t_fit), np.log(sup_fit))
        slopes[int(k)] = slope
        half_widths[int(k)] = half
        ax.loglog(t, sup, marker=".", lw=1.0, label=f"band {k}: slope {slope:.2f} ± {half:.2f}")
    t_all = table["t"]
    guide_t = np.geomspace(t_all.min(), t_all.max(), 50)
    ref = float(np.median(table["sup_norm"]))
    ax.loglog(
        guide_t,
        ref * (guide_t / guide_t[0]) ** -0.5,
        "k--",
        lw=1.0,
        label=r"$t^{-1/2}$ guide",
    )
    ax.set_xlabel("t")
    ax.set_ylabel("band sup norm")
    ax.set_title("Dispersive band decay")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return {"slopes": slopes, "half_widths": half_widths}


def _render_phase(spec: FigureSpec) -> dict:
    table = read_table(spec.input_csv, EXPECTED_SCHEMA["phase"])
    _require_columns(
        table, ["t", "xi", "abs_v", "arg_raw", "arg_corrected"], spec.input_csv
    )
    # Pick the tracked frequency with the largest mean amplitude.
    xis = np.unique(table["xi"])
    mean_amp = [table["abs_v"][table["xi"] == x].mean() for x in xis]
    xi = float(xis[int(np.argmax(mean_amp))])
    sel = table["xi"] == xi
    t = table["t"][sel]
    order = np.argsort(t)
    t = t[order]
    raw = np.unwrap(table["arg_raw"][sel][order])
    corrected = np.unwrap(table["arg_corrected"][sel][order])
    late = t >= 0.5 * t.max()
    var_raw = float(np.var(raw[late]))
    var_corrected = float(np.var(corrected[late]))

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(t, raw - raw[0], lw=1.2, label=f"raw (late var {var_raw:.2e})")
    ax.plot(
        t,
        corrected - corrected[0],
        lw=1.2,
        label=f"corrected (late var {var_corrected:.2e})",
    )
    ax.set_xlabel("t")
    ax.set_ylabel("phase drift (rad)")
    ax.set_title(f"Profile phase at xi = {xi:.3f}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return {"xi": xi, "var_raw": var_raw, "var_corrected": var_corrected}


def _render_norms(spec: FigureSpec) -> dict:
    table = read_table(spec.input_csv, EXPECTED_SCHEMA["norms"])
    _require_columns(
        table, ["t", "sobolev_h_n0alpha", "z_norm"], spec.input_csv
    )
    manifest = _sidecar_manifest(spec.input_csv)
    p0 = float(manifest.get("p0", DEFAULT_P0))
    t = table["t"]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for name in ("sobolev_h_n0alpha", "s_norm_h_n1alpha", "z_norm"):
        if name in table and table[name][0] > 0:
            ax.plot(t, table[name] / table[name][0], lw=1.2, label=name)
    guide = (1.0 + t**2) ** (p0 / 2.0)
    ax.plot(t, guide, "k--", lw=1.0, label=rf"$\langle t\rangle^{{p_0}}$, $p_0$={p0:.2e}")
    ax.set_xlabel("t")
    ax.set_ylabel("norm / initial value")
    ax.set_title("Norm growth against the slow-growth guide")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return {"p0": p0, "final_over_initial": {
        name: float(table[name][-1] / table[name][0])
        for name in ("sobolev_h_n0alpha", "z_norm")
        if table[name][0] > 0
    }}


def _render_symbols(spec: FigureSpec) -> dict:
    table = read_table(spec.input_csv, EXPECTED_SCHEMA["symbols"])
    _require_columns(
        table, ["l1", "l2", "l3", "m1_cube", "m1_osc", "rel_diff"], spec.input_csv
    )
    cube = table["m1_cube"]
    osc = table["m1_osc"]
    worst = float(np.max(table["rel_diff"]))
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    lim = 1.1 * float(np.max(np.abs(np.concatenate([cube, osc]))))
    ax.plot([-lim, lim], [-lim, lim], "k--", lw=1.0, label="agreement line")
    ax.plot(cube, osc, "o", ms=5, alpha=0.8, label=f"worst rel diff {worst:.1e}")
    ax.set_xlabel("closed-form symbol")
    ax.set_ylabel("oscillatory-integral symbol")
    ax.set_title("Cubic symbol oracle agreement")
    ax.set_aspect("equal")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return {"worst_rel_diff": worst}


_RENDERERS = {
    "decay": _render_decay,
    "phase": _render_phase,
    "norms": _render_norms,
    "symbols": _render_symbols,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure and return a summary of the fitted quantities."""
    return _RENDERERS[spec.kind](spec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gsqglab-plot",
        description="Render a figure from a gsqglab CSV artifact",
    )
    parser.add_argument("--input", required=True, help="schema-tagged CSV file")
    parser.add_argument(
        "--kind", required=True, choices=sorted(EXPECTED_SCHEMA)
    )
    parser.add_argument("--output", required=True, help="image file to write")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(input_csv=args.input, kind=args.kind, output=args.output)
        info = render(spec)
    except (SchemaError, CsvFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(info, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
