"""Compare the compiled kernel backend against the NumPy fallback.

Run directly:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from gsqglab import _kernels_py, kernels
from gsqglab.params import binomial_coeffs


def make_inputs(n_nodes, n_x, seed=0):
    rng = np.random.default_rng(seed)
    h = 0.01 * rng.standard_normal(n_x)
    hx = 0.01 * rng.standard_normal(n_x)
    shift = lambda: h + 1e-4 * rng.standard_normal((n_nodes, n_x))
    shift_x = lambda: hx + 1e-4 * rng.standard_normal((n_nodes, n_x))
    y = np.geomspace(1e-8, 100.0, n_nodes)
    return h, hx, shift(), shift(), shift_x(), shift_x(), 1.0 / y, np.ones(n_nodes)


def bench(fn, args, repeats=5):
    fn(*args)  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    alpha = 1.5
    d = binomial_coeffs(alpha, 8)
    print(f"active backend: {kernels.BACKEND}")
    for n_nodes, n_x in [(608, 256), (1017, 1024), (1440, 4096)]:
        args = make_inputs(n_nodes, n_x)
        t_active = bench(kernels.contract_full, (*args, alpha, d))
        t_numpy = bench(_kernels_py.contract_full, (*args, alpha, d))
        out_a = kernels.contract_full(*args, alpha, d)
        out_b = _kernels_py.contract_full(*args, alpha, d)
        gap = np.max(np.abs(out_a - out_b)) / max(np.max(np.abs(out_b)), 1e-300)
        print(
            f"nodes={n_nodes:5d} n_x={n_x:5d}: "
            f"{kernels.BACKEND} {t_active * 1e3:8.2f} ms, "
            f"numpy {t_numpy * 1e3:8.2f} ms, "
            f"speedup {t_numpy / t_active:5.2f}x, rel gap {gap:.2e}"
        )


if __name__ == "__main__":
    main()
