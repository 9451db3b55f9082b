"""Pure-numpy implementation of the quadratic-cost response kernel.

`marg_correction` evaluates, for every grid time t_j, the integral over
u in [0, t_j] of the part of the factorized-state response integrand that
differs from the correlated-state one:

    delta_j(u) = p0 p1 e^{-i dw u} [ Psi_1(u) (e^{i(phi_j - phi_{j-k})} - 1)
                                   - Psi_1*(u) (e^{-i(phi_j - phi_{j-k})} - 1) ]

sampled at u = k h, where phi is the two-time boundary phase and the row
index j fixes the observation time.  Expressing the factorized-state
response as "correlated response + this correction" makes the two exactly
equal whenever the phase vanishes (uncoupled bath), instead of equal only
up to quadrature noise.

The row integral uses the same segment-parabola rule as
`numerics.cumulative_integral`; a one-point row is zero and a two-point row
falls back to the trapezoid since there is no third sample inside the
domain.
"""

from __future__ import annotations

import numpy as np


def _row_weights(j: int, n: int) -> np.ndarray:
    """Integration weights (units of the spacing) for a row ending at index j."""
    w = np.zeros(n)
    if j == 0:
        return w
    if j == 1:
        w[0] = w[1] = 0.5
        return w
    if j == 2:
        w[:3] = (4.0, 16.0, 4.0)
        w[:3] /= 12.0
        return w
    if j == 3:
        w[:4] = (4.0, 15.0, 12.0, 5.0)
        w[:4] /= 12.0
        return w
    w[: j + 1] = 1.0
    w[0] = 4.0 / 12.0
    w[1] = 15.0 / 12.0
    w[2] = 11.0 / 12.0
    w[j - 1] = 13.0 / 12.0
    w[j] = 5.0 / 12.0
    return w


def marg_correction(
    exp_dw: np.ndarray,
    psi1_tab: np.ndarray,
    cphase: np.ndarray,
    h: float,
    p0p1: float,
    block_size: int = 256,
) -> np.ndarray:
    """Row integrals of the correction integrand; see module docstring.

    exp_dw[k] = exp(-i dw k h), psi1_tab[k] = Psi_1(k h), cphase[m] =
    exp(i phi_m).  Returns a complex array of length n with entry j equal
    to the correction to the response at t_j.
    """
    exp_dw = np.ascontiguousarray(exp_dw, dtype=complex)
    psi1_tab = np.ascontiguousarray(psi1_tab, dtype=complex)
    cphase = np.ascontiguousarray(cphase, dtype=complex)
    n = exp_dw.size
    if psi1_tab.size != n or cphase.size != n:
        raise ValueError("table length mismatch")
    out = np.zeros(n, dtype=complex)
    if n == 0 or p0p1 == 0.0:
        return out

    k = np.arange(n)
    base = exp_dw * psi1_tab
    base_c = exp_dw * psi1_tab.conj()
    for j0 in range(0, n, block_size):
        j1 = min(j0 + block_size, n)
        rows = np.arange(j0, j1)
        idx = rows[:, None] - k[None, :]
        np.clip(idx, 0, None, out=idx)
        rev = cphase[idx]
        cj = cphase[rows][:, None]
        delta = base * (cj * rev.conj() - 1.0) - base_c * (cj.conj() * rev - 1.0)
        weights = np.empty((rows.size, n))
        for r, j in enumerate(rows):
            weights[r] = _row_weights(int(j), n)
        out[j0:j1] = (weights * delta).sum(axis=1)
    out *= h * p0p1
    return out
