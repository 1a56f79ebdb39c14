"""NumPy fallback for the quadrature contraction kernels.

Same contract as the Cython extension: given the field and its shifted
copies at every quadrature node, contract over nodes to produce the
nonlinearity samples.  Work is chunked over nodes to bound memory.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_CHUNK = 128
# Below this (delta h / y)^2 the stable expm1/log1p evaluation of
# (1 + rho)^(-alpha/2) - 1 is replaced by its 8-term series, which agrees
# to ~1e-24 relative and avoids the transcendental calls.
RHO_SWITCH = 1e-3


def _bracket(rho: np.ndarray, neg_half_alpha: float, d: np.ndarray) -> np.ndarray:
    """(1 + rho)^(-alpha/2) - 1, evaluated without cancellation."""
    small = rho <= RHO_SWITCH
    out = np.empty_like(rho)
    r = rho[small]
    acc = np.full_like(r, d[7])
    for k in range(6, -1, -1):
        acc = acc * r + d[k]
    out[small] = acc * r
    r = rho[~small]
    out[~small] = np.expm1(neg_half_alpha * np.log1p(r))
    return out


def contract_full(h, hx, h_minus, h_plus, hx_minus, hx_plus, inv_y, wy, alpha, d):
    """Full singular-integral nonlinearity, folded over +-y."""
    nq = wy.shape[0]
    out = np.zeros_like(h)
    neg_half_alpha = -alpha / 2.0
    for q0 in range(0, nq, _CHUNK):
        q1 = min(q0 + _CHUNK, nq)
        iv = inv_y[q0:q1, None]
        rm = ((h[None, :] - h_minus[q0:q1]) * iv) ** 2
        rp = ((h[None, :] - h_plus[q0:q1]) * iv) ** 2
        gm = _bracket(rm, neg_half_alpha, d)
        gp = _bracket(rp, neg_half_alpha, d)
        term = (hx[None, :] - hx_minus[q0:q1]) * gm
        term += (hx[None, :] - hx_plus[q0:q1]) * gp
        out += wy[q0:q1] @ term
    return out


def contract_order_n(h, hx, h_minus, h_plus, hx_minus, hx_plus, inv_y, wy, n):
    """Single expansion order: kernel (delta hx) |y|^-alpha (delta h / y)^(2n),
    without its binomial prefactor."""
    nq = wy.shape[0]
    out = np.zeros_like(h)
    for q0 in range(0, nq, _CHUNK):
        q1 = min(q0 + _CHUNK, nq)
        iv = inv_y[q0:q1, None]
        rm = ((h[None, :] - h_minus[q0:q1]) * iv) ** 2
        rp = ((h[None, :] - h_plus[q0:q1]) * iv) ** 2
        term = (hx[None, :] - hx_minus[q0:q1]) * rm**n
        term += (hx[None, :] - hx_plus[q0:q1]) * rp**n
        out += wy[q0:q1] @ term
    return out
