"""Nonlinear term of the interface equation, three independent ways.

The interface height h on a periodic cell evolves by

    dh/dt = integral over y of
        [h_x(x) - h_x(x-y)] * [((h(x)-h(x-y))^2 + y^2)^(-alpha/2) - |y|^(-alpha)] dy

after subtracting the linear dispersive part.  This module evaluates that
singular integral (``eval_full``), the individual terms of its expansion
in powers of (delta h / y)^2 (``eval_order_n``), and the cubic term once
more through its frequency-space multiplier (``eval_cubic_spectral``).
The three routes share no code past the grid, which is what makes their
agreement a meaningful check.

All physical-space quadrature is folded onto y > 0: the integrand is
evaluated at +y and -y and summed, which cancels the odd part analytically
and leaves an O(|y|^(2-alpha)) integrable remainder at the origin.
"""

from __future__ import annotations

import numpy as np
from scipy import fft as sfft

from .grid import Grid, SpectralField, from_samples, spectral_derivative
from .kernels import contract_full, contract_order_n
from .params import AlphaParams, binomial_coeffs
from .quadrature import QuadratureSpec, build_nodes
from .symbols import QuadratureAccuracyError, SymbolTable, m1_cube

__all__ = [
    "RegimeExitError",
    "NonlinearEvaluator",
    "eval_full",
    "eval_order_n",
    "eval_series",
    "eval_cubic_spectral",
]

# Richardson tolerance for the quadrature self-check, relative to sup|N|.
QUAD_CHECK_TOL = 1e-7

# Work guard for the explicit triple sum in eval_cubic_spectral.
_MAX_TRIPLES = 200_000_000

_SHIFT_CHUNK = 256


class RegimeExitError(RuntimeError):
    """The interface left the graph regime (sup |h_x| >= 1)."""


class NonlinearEvaluator:
    """Physical-space evaluator bound to one grid and one quadrature rule.

    Precomputes the quadrature nodes and the packed shift multipliers
    exp(-i xi y), so repeated evaluations (one per RK stage) only cost the
    batched inverse FFTs and the node contraction.

    Parameters
    ----------
    params, grid, quad : problem constants, periodic grid, quadrature rule.
    active_xi : highest frequency the outer panels must resolve; defaults
        to the grid maximum (safe but node-hungry; pass the top of the
        energetic band for long runs).
    """

    def __init__(
        self,
        params: AlphaParams,
        grid: Grid,
        quad: QuadratureSpec,
        active_xi: float | None = None,
    ):
        quad.validate(grid)
        self.params = params
        self.grid = grid
        self.quad = quad
        self.active_xi = active_xi
        self.y, self.w = build_nodes(quad, grid, params.alpha, active_xi=active_xi)
        self._refined: tuple[np.ndarray, np.ndarray] | None = None
        self.inv_y = 1.0 / self.y
        self.w_alpha = self.w * self.y ** (-params.alpha)
        self.series_d = binomial_coeffs(params.alpha, 8)
        self._packs = self._build_packs(self.y)
        # 2/3-rule mask: physical-space products alias into the top third
        # of the spectrum; evaluator output is truncated there.
        k_int = np.fft.fftfreq(grid.n_modes, d=1.0 / grid.n_modes).astype(int)
        self._dealias_mask = np.abs(k_int) <= grid.n_modes // 3

    def _from_samples(self, samples: np.ndarray) -> SpectralField:
        f = from_samples(self.grid, samples)
        f.coeffs[~self._dealias_mask] = 0.0
        return f

    def _build_packs(self, y: np.ndarray) -> list[np.ndarray]:
        """Chunked multipliers turning coeffs into h(x-y) + i*h(x+y)."""
        freqs = self.grid.freqs
        origin = np.exp(-1j * freqs * (self.grid.period_l / 2.0))
        packs = []
        for q0 in range(0, y.shape[0], _SHIFT_CHUNK):
            em = np.exp(-1j * np.outer(y[q0 : q0 + _SHIFT_CHUNK], freqs))
            packs.append((em + 1j * np.conj(em)) * origin[np.newaxis, :])
        return packs

    def _contract(
        self,
        h: SpectralField,
        kernel,
        packs: list[np.ndarray],
        wy: np.ndarray,
        inv_y: np.ndarray,
        extra,
    ) -> np.ndarray:
        scale = self.grid.n_modes / self.grid.period_l
        hv = h.values()
        hx = spectral_derivative(h)
        hxv = hx.values()
        if np.max(np.abs(hxv)) >= 1.0:
            raise RegimeExitError(
                f"sup |h_x| = {np.max(np.abs(hxv)):.3g} >= 1; "
                "evaluator is outside its validity regime"
            )
        out = np.zeros_like(hv)
        q0 = 0
        for pack in packs:
            q1 = q0 + pack.shape[0]
            zh = sfft.ifft(h.coeffs[np.newaxis, :] * pack, axis=1) * scale
            zx = sfft.ifft(hx.coeffs[np.newaxis, :] * pack, axis=1) * scale
            out += kernel(
                hv,
                hxv,
                np.ascontiguousarray(zh.real),
                np.ascontiguousarray(zh.imag),
                np.ascontiguousarray(zx.real),
                np.ascontiguousarray(zx.imag),
                inv_y[q0:q1],
                wy[q0:q1],
                *extra,
            )
            q0 = q1
        return out

    def _refined_rule(self):
        if self._refined is None:
            y, w = build_nodes(
                self.quad,
                self.grid,
                self.params.alpha,
                active_xi=self.active_xi,
                refine=True,
            )
            self._refined = (
                y,
                w,
                1.0 / y,
                w * y ** (-self.params.alpha),
                self._build_packs(y),
            )
        return self._refined

    def _full_samples(self, h: SpectralField, refined: bool) -> np.ndarray:
        extra = (self.params.alpha, self.series_d)
        if refined:
            _, _, inv_y, w_alpha, packs = self._refined_rule()
        else:
            inv_y, w_alpha, packs = self.inv_y, self.w_alpha, self._packs
        return self._contract(h, contract_full, packs, w_alpha, inv_y, extra)

    def eval_full(self, h: SpectralField, check: bool = False) -> SpectralField:
        """Full singular integral, sampled on the grid.

        With ``check=True`` the integral is recomputed on a once-refined
        panel set and the two answers compared (a Richardson estimate of
        the quadrature error); disagreement beyond QUAD_CHECK_TOL raises
        QuadratureAccuracyError naming the worst grid node.
        """
        coarse = self._full_samples(h, refined=False)
        if check:
            fine = self._full_samples(h, refined=True)
            diff = np.abs(fine - coarse)
            scale = max(np.max(np.abs(fine)), 1e-300)
            worst = int(np.argmax(diff))
            if np.max(diff) > QUAD_CHECK_TOL * scale:
                raise QuadratureAccuracyError(
                    f"quadrature self-check failed: relative error "
                    f"{np.max(diff) / scale:.3e} at x = "
                    f"{self.grid.nodes[worst]:.6g}"
                )
            coarse = fine
        return self._from_samples(coarse)

    def eval_order_n(self, h: SpectralField, n: int) -> SpectralField:
        """Expansion term d_n * integral (delta h_x) |y|^-alpha (delta h/y)^(2n) dy."""
        if not 1 <= n <= 6:
            raise ValueError(f"expansion order must be in 1..6; got {n!r}")
        samples = self._contract(
            h, contract_order_n, self._packs, self.w_alpha, self.inv_y, (n,)
        )
        return self._from_samples(self.series_d[n - 1] * samples)

    def eval_series(self, h: SpectralField, n_max: int) -> SpectralField:
        """Partial sum of the expansion terms up to order n_max."""
        total = self.eval_order_n(h, 1)
        for n in range(2, n_max + 1):
            total = SpectralField(
                self.grid, total.coeffs + self.eval_order_n(h, n).coeffs
            )
        return total


def eval_full(
    params: AlphaParams,
    quad: QuadratureSpec,
    h: SpectralField,
    check: bool = False,
) -> SpectralField:
    """One-shot wrapper around NonlinearEvaluator.eval_full."""
    return NonlinearEvaluator(params, h.grid, quad).eval_full(h, check=check)


def eval_order_n(
    params: AlphaParams, quad: QuadratureSpec, h: SpectralField, n: int
) -> SpectralField:
    """One-shot wrapper around NonlinearEvaluator.eval_order_n."""
    return NonlinearEvaluator(params, h.grid, quad).eval_order_n(h, n)


def eval_series(
    params: AlphaParams, quad: QuadratureSpec, h: SpectralField, n_max: int
) -> SpectralField:
    """One-shot wrapper around NonlinearEvaluator.eval_series."""
    return NonlinearEvaluator(params, h.grid, quad).eval_series(h, n_max)


def eval_cubic_spectral(
    params: AlphaParams,
    h: SpectralField,
    m1_table: SymbolTable | None = None,
    rel_floor: float = 1e-14,
) -> SpectralField:
    """Cubic term through its frequency-space multiplier.

    Computes F[N1](xi) = (i/3) (2 pi / L)^2 * sum over frequency pairs of
    m1(l1, l2, xi - l1 - l2) hhat(l1) hhat(l2) hhat(xi - l1 - l2), with the
    sum restricted to the dealiased two-thirds band.  The triple sum runs
    over the modes actually present in h (relative magnitude > rel_floor),
    so it is exact for band-limited data and priced accordingly.
    """
    grid = h.grid
    n = grid.n_modes
    k_cut = n // 3
    c = h.coeffs
    peak = np.max(np.abs(c))
    out = np.zeros(n, dtype=complex)
    if peak == 0.0:
        return SpectralField(grid, out)

    k_all = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    active = np.nonzero((np.abs(c) > rel_floor * peak) & (np.abs(k_all) <= k_cut))[0]
    if active.size**3 > _MAX_TRIPLES:
        raise ValueError(
            f"{active.size} active modes: explicit triple sum too large; "
            "evaluate through the physical-space route instead"
        )
    k_act = k_all[active]
    lam_act = grid.dxi * k_act
    c_act = c[active]

    # Sum over pairs, vectorizing the innermost index.  The output
    # frequency is xi = l1 + l2 + l3, kept only inside the dealiased band.
    for i in range(active.size):
        for j in range(active.size):
            k3 = k_act + (k_act[i] + k_act[j])
            keep = np.abs(k3) <= k_cut
            if not np.any(keep):
                continue
            lam3 = lam_act[keep]
            if m1_table is not None:
                m1 = m1_table.eval(
                    np.full(lam3.shape, lam_act[i]),
                    np.full(lam3.shape, lam_act[j]),
                    lam3,
                )
            else:
                m1 = m1_cube(params, lam_act[i], lam_act[j], lam3)
            np.add.at(
                out,
                np.mod(k3[keep], n),
                m1 * (c_act[i] * c_act[j]) * c_act[keep],
            )
    out *= (1j / 3.0) * grid.dxi**2
    out[grid.nyquist_index] = 0.0
    return SpectralField(grid, out)
