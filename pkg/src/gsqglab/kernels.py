"""Backend selection for the contraction kernels.

Prefers the compiled extension when it was built, otherwise falls back to
the pure NumPy implementation.  Both expose the same two functions and a
BACKEND tag so callers (and the benchmark) can tell which one is active.
"""

from __future__ import annotations

try:
    from . import _kernels as _impl  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
RHO_SWITCH: float = _impl.RHO_SWITCH
contract_full = _impl.contract_full
contract_order_n = _impl.contract_order_n
