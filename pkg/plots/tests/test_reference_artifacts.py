"""End-to-end figure checks against real simulator artifacts.

These tests run only when the artifact directories exist at the repository
root (``out/decay``, ``out/reference``, ``out/symbols``); they are skipped
otherwise so this package's suite stays self-contained.
"""

import json
import os

import pytest

from gsqglab_plots import FigureSpec, render

REPO = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
OUT = os.path.join(REPO, "out")


def _need(*parts):
    path = os.path.join(OUT, *parts)
    if not os.path.exists(path):
        pytest.skip(f"artifact {path} not present")
    return path


def test_decay_figure_slope_matches_manifest(tmp_path):
    csv = _need("decay", "decay.csv")
    with open(_need("decay", "decay_manifest.json")) as fh:
        manifest = json.load(fh)
    out = tmp_path / "decay.png"
    info = render(FigureSpec(csv, "decay", str(out)))
    assert out.exists() and out.stat().st_size > 0
    for band, want in manifest["slopes"].items():
        got = info["slopes"][int(band)]
        assert round(got, 2) == round(want, 2), (band, got, want)


def test_phase_figure_from_reference_run(tmp_path):
    csv = _need("reference", "phases.csv")
    out = tmp_path / "phase.png"
    info = render(FigureSpec(csv, "phase", str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert info["var_corrected"] <= info["var_raw"]


def test_norms_figure_from_reference_run(tmp_path):
    csv = _need("reference", "diagnostics.csv")
    out = tmp_path / "norms.png"
    info = render(FigureSpec(csv, "norms", str(out)))
    assert out.exists() and out.stat().st_size > 0
    # p0 must come from the run manifest sitting next to the CSV.
    with open(_need("reference", "manifest.json")) as fh:
        assert info["p0"] == json.load(fh)["p0"]


def test_symbols_figure_from_cli_artifacts(tmp_path):
    csv = _need("symbols", "symbols.csv")
    out = tmp_path / "symbols.png"
    info = render(FigureSpec(csv, "symbols", str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert info["worst_rel_diff"] < 1e-4
