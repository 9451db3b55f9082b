# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the quadratic-cost response kernel.

Same contract as `_response_py.marg_correction`; kept in lockstep by the
backend-equivalence tests.  The double loop over (observation time, lag)
is the package's only quadratic hot spot, which is why it gets a compiled
variant at all.
"""

import numpy as np


def marg_correction(exp_dw, psi1_tab, cphase, double h, double p0p1):
    cdef const double complex[::1] e = np.ascontiguousarray(exp_dw, dtype=np.complex128)
    cdef const double complex[::1] p = np.ascontiguousarray(psi1_tab, dtype=np.complex128)
    cdef const double complex[::1] c = np.ascontiguousarray(cphase, dtype=np.complex128)
    cdef Py_ssize_t n = e.shape[0]
    if p.shape[0] != n or c.shape[0] != n:
        raise ValueError("table length mismatch")
    out = np.zeros(n, dtype=np.complex128)
    if n == 0 or p0p1 == 0.0:
        return out
    cdef double complex[::1] ov = out
    cdef Py_ssize_t j, k
    cdef double complex cj, cjc, rev, acc, delta
    cdef double w
    for j in range(1, n):
        cj = c[j]
        cjc = cj.conjugate()
        acc = 0
        for k in range(j + 1):
            rev = c[j - k]
            delta = e[k] * (
                p[k] * (cj * rev.conjugate() - 1.0)
                - p[k].conjugate() * (cjc * rev - 1.0)
            )
            if j == 1:
                w = 0.5
            elif j == 2:
                w = 16.0 / 12.0 if k == 1 else 4.0 / 12.0
            elif j == 3:
                if k == 0:
                    w = 4.0 / 12.0
                elif k == 1:
                    w = 15.0 / 12.0
                elif k == 2:
                    w = 12.0 / 12.0
                else:
                    w = 5.0 / 12.0
            else:
                if k == j:
                    w = 5.0 / 12.0
                elif k == j - 1:
                    w = 13.0 / 12.0
                elif k == 0:
                    w = 4.0 / 12.0
                elif k == 1:
                    w = 15.0 / 12.0
                elif k == 2:
                    w = 11.0 / 12.0
                else:
                    w = 1.0
            acc = acc + w * delta
        ov[j] = h * p0p1 * acc
    return out
