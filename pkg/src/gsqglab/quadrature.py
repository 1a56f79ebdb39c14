"""Quadrature node construction for the singular y-integrals.

The integrand of the nonlinearity, after combining the +y and -y
half-lines, vanishes like |y|^(2-alpha) at the origin and decays like
|y|^(-alpha-2) at infinity.  Nodes are therefore built in two parts:

* a graded inner region: geometric panels shrinking toward y = 0, each
  carrying a small Gauss-Legendre rule, down to a floor where the
  remaining analytic contribution is below roundoff;

* a smooth outer region: panels growing geometrically away from the cut,
  with the panel width capped so the per-panel Gauss rule resolves the
  oscillation of the field content (controlled by ``active_xi``).

Only positive nodes are produced; evaluators fold in the -y contribution
analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

# Innermost panel edge, relative to inner_cut.  Grading deeper than this
# amplifies FFT roundoff through the (delta h / y)^2 factor faster than it
# buys accuracy; the remaining [0, floor] stub is added analytically from
# the integrand's C * y^(1-alpha) leading behavior instead.
GRADING_FLOOR = 2e-8
INNER_NODES_PER_PANEL = 8


class QuadratureSpecError(ValueError):
    """Raised for inconsistent quadrature configuration."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Node-count and tail-handling policy for the y-integrals."""

    inner_cut: float = 0.5
    n_inner: int = 160
    n_outer: int = 1280
    tail_rule: str = "truncate_at_half_period"
    n_images: int = 3

    def validate(self, grid: Grid) -> None:
        if self.inner_cut <= 0 or self.inner_cut >= grid.dx * 1e4:
            raise QuadratureSpecError(
                f"inner_cut {self.inner_cut} outside (0, {grid.dx * 1e4})"
            )
        if self.n_inner < 8 or self.n_outer < 8:
            raise QuadratureSpecError("node counts must be at least 8")
        if self.tail_rule not in ("truncate_at_half_period", "periodic_image_sum"):
            raise QuadratureSpecError(f"unknown tail_rule {self.tail_rule!r}")
        if self.n_images < 1:
            raise QuadratureSpecError("n_images must be >= 1")


def _panel_nodes(a: float, b: float, p: int, refine: bool):
    """Gauss-Legendre nodes/weights on [a, b]; refined mode splits in two."""
    xs, ws = np.polynomial.legendre.leggauss(p)
    if refine:
        mid = 0.5 * (a + b)
        return tuple(
            np.concatenate(arrays)
            for arrays in zip(
                _panel_nodes(a, mid, p, False), _panel_nodes(mid, b, p, False)
            )
        )
    half = 0.5 * (b - a)
    return half * xs + 0.5 * (a + b), half * ws


def build_nodes(
    spec: QuadratureSpec,
    grid: Grid,
    alpha: float,
    active_xi: float | None = None,
    refine: bool = False,
):
    """Positive quadrature nodes and weights for the y-integral.

    ``refine=True`` doubles every panel (split in half) and is used for the
    internal quadrature error estimate.
    """
    spec.validate(grid)
    if active_xi is None:
        active_xi = grid.xi_max
    kappa = max(2.0 * active_xi, 1e-3)

    ys, ws = [], []

    # Analytic stub for [0, floor]: the folded integrand is C*y^(1-alpha)
    # there (up to O(y^2) relative), so the stub integral equals the
    # integrand at the floor edge times y_edge / (2 - alpha).  Realized as
    # one extra node carrying that weight.
    y_edge = spec.inner_cut * GRADING_FLOOR
    ys.append(np.array([y_edge]))
    ws.append(np.array([y_edge / (2.0 - alpha)]))

    # Inner graded panels: inner_cut * r^j down to the grading floor.
    n_panels = max(4, spec.n_inner // INNER_NODES_PER_PANEL)
    ratio = GRADING_FLOOR ** (1.0 / n_panels)
    edges = spec.inner_cut * ratio ** np.arange(n_panels + 1)
    for a, b in zip(edges[1:], edges[:-1]):
        y, w = _panel_nodes(a, b, INNER_NODES_PER_PANEL, refine)
        ys.append(y)
        ws.append(w)

    # Outer panels: geometric growth with an oscillation-resolving cap.
    if spec.tail_rule == "truncate_at_half_period":
        y_max = grid.period_l / 2.0
    else:
        y_max = (0.5 + spec.n_images) * grid.period_l
    p_outer = 16
    for _ in range(2):
        w_cap = 1.4 * p_outer / kappa
        bounds = []
        pos = spec.inner_cut
        width = min(spec.inner_cut, w_cap)
        while pos < y_max:
            width = min(width * 1.35, w_cap, y_max - pos)
            bounds.append((pos, pos + width))
            pos += width
        p_new = int(np.clip(round(spec.n_outer / max(len(bounds), 1)), 8, 32))
        if p_new == p_outer:
            break
        p_outer = p_new
    for a, b in bounds:
        y, w = _panel_nodes(a, b, p_outer, refine)
        ys.append(y)
        ws.append(w)

    y = np.concatenate(ys)
    w = np.concatenate(ws)
    order = np.argsort(y)
    return y[order], w[order]
