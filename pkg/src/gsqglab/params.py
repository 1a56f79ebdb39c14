"""Model parameters and the dispersion relation.

Everything downstream is a pure function of the fractional order ``alpha``:
the dispersion constant ``gamma``, the bookkeeping exponents used by the
norms, the leading binomial coefficient of the nonlinearity expansion, and
the phase-correction normalization ``k_alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


class DomainError(ValueError):
    """Raised when a parameter is outside its admissible range."""


@dataclass(frozen=True)
class AlphaParams:
    """All constants derived from the fractional order alpha in (1, 2)."""

    alpha: float
    gamma: float
    beta: float
    p0: float
    n0: int
    n1: int
    n2: int
    d1: float
    k_alpha: float


def make_alpha_params(alpha: float) -> AlphaParams:
    """Build the derived-constant set for a given fractional order.

    Raises :class:`DomainError` unless ``1 < alpha < 2``.
    """
    alpha = float(alpha)
    if not (1.0 < alpha < 2.0):
        raise DomainError(
            f"alpha must lie in the open interval (1, 2); got {alpha!r}"
        )
    gamma = 2.0 * math.gamma(2.0 - alpha) * math.sin(alpha * math.pi / 2.0) / (alpha - 1.0)
    beta = (2.0 - alpha) / 10.0
    return AlphaParams(
        alpha=alpha,
        gamma=gamma,
        beta=beta,
        p0=1e-6 * beta,
        n0=20,
        n1=4,
        n2=8,
        d1=-alpha / 2.0,
        k_alpha=2.0 * math.pi / (gamma * alpha * (alpha - 1.0)),
    )


def gamma_quadrature(alpha: float, split: float = 50.0) -> float:
    """Dispersion constant by direct quadrature of (1 - cos y) / |y|^alpha.

    Independent cross-check of the closed form in :func:`make_alpha_params`.
    The head ``[0, split]`` is integrated adaptively; the tail splits into an
    exact power-law part and an oscillatory cosine part handled by the
    Fourier-weighted rule.
    """
    if not (1.0 < alpha < 2.0):
        raise DomainError(
            f"alpha must lie in the open interval (1, 2); got {alpha!r}"
        )
    head, _ = integrate.quad(
        lambda y: (1.0 - math.cos(y)) * y ** (-alpha),
        0.0,
        split,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    tail_power = split ** (1.0 - alpha) / (alpha - 1.0)
    tail_cos, _ = integrate.quad(
        lambda y: y ** (-alpha), split, np.inf, weight="cos", wvar=1.0
    )
    return 2.0 * (head + tail_power - tail_cos)


def dispersion(params: AlphaParams, xi):
    """Linear dispersion relation: gamma * xi * |xi|^(alpha - 1), odd in xi."""
    xi = np.asarray(xi, dtype=float)
    out = params.gamma * xi * np.abs(xi) ** (params.alpha - 1.0)
    return out if out.ndim else float(out)


def binomial_coeffs(alpha: float, n_max: int) -> np.ndarray:
    """Coefficients d_1..d_n_max of the expansion (1+r)^(-alpha/2) = 1 + sum d_n r^n."""
    d = np.empty(n_max, dtype=float)
    cur = 1.0
    for n in range(1, n_max + 1):
        cur *= (-alpha / 2.0 - (n - 1)) / n
        d[n - 1] = cur
    return d
