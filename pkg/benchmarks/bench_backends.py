"""Benchmark the factorized-response correction kernel across backends.

The correction term is the only O(n^2) piece of the pipeline: row j of the
output integrates a j-point lag sum, so cost scales with the square of the
grid size.  This script times the compiled extension against the pure-numpy
fallback on realistic inputs and checks they agree.

Usage: python benchmarks/bench_backends.py [n_points ...]
"""

import importlib
import sys
import time

import numpy as np

from corrtrace import _response_py


def _load_cython():
    try:
        return importlib.import_module("corrtrace._response_cy")
    except ImportError:
        return None


def make_inputs(n: int):
    h = 100.0 / (n - 1)
    t = h * np.arange(n)
    exp_dw = np.exp(1j * 0.2 * t)
    psi1_tab = np.exp(-(0.5 * np.log1p((0.2 * t) ** 2)) + 1j * np.arctan(0.2 * t))
    cphase = np.exp(2j * np.arctan(0.2 * t))
    return exp_dw, psi1_tab, cphase, h


def time_call(fn, args, repeats: int = 5) -> float:
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv) -> int:
    sizes = [int(a) for a in argv[1:]] or [501, 2001, 4001]
    cy = _load_cython()
    print(f"{'n':>6} {'numpy':>12} {'cython':>12} {'speedup':>8}   max |diff|")
    for n in sizes:
        exp_dw, psi1_tab, cphase, h = make_inputs(n)
        args = (exp_dw, psi1_tab, cphase, h, 0.25)
        ref = _response_py.marg_correction(*args)
        t_py = time_call(_response_py.marg_correction, args)
        if cy is None:
            print(f"{n:>6} {t_py * 1e3:>10.2f}ms {'missing':>12}")
            continue
        got = cy.marg_correction(*args)
        t_cy = time_call(cy.marg_correction, args)
        diff = float(np.max(np.abs(got - ref)))
        print(
            f"{n:>6} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms"
            f" {t_py / t_cy:>7.1f}x   {diff:.2e}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
