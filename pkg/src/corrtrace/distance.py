"""Distance between the two first-order evolutions.

The correlated and factorized initial states give identical populations to
first order, so the difference of the two reduced density matrices is a
traceless matrix with only coherences:

    M(t) = rho_corr(t) - rho_marg(t),
    M_10 = i (eps/2) e^{-i w_p t} (A_corr(t) - A_marg(t)),

and the qubit trace distance has the closed form

    D(t) = (1/2) ||M||_1 = sqrt(a^2 + |M_10|^2) = (eps/2) |A_corr - A_marg|

with a = M_00 = -M_11 (zero here).  The Hilbert-Schmidt distance is then
sqrt(2) D.  D(0) = 0 and any D(t) > 0 witnesses system-bath correlations
in the initial Gibbs state: for a factorized start, no completely positive
reduced dynamics could let the two trajectories split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import QubitMatrix, reduced_density
from .model import ModelConfig
from .numerics import ComplexSeries

__all__ = [
    "GridMismatch",
    "NonHermitianInput",
    "NotTraceless",
    "DistanceSeries",
    "difference_matrix",
    "trace_distance_qubit",
    "hs_distance_qubit",
    "distance_series",
]

_TOL = 1e-12


class GridMismatch(ValueError):
    """Two series meant to be compared live on different grids."""


class NonHermitianInput(ValueError):
    """A matrix that must be Hermitian is not."""


class NotTraceless(ValueError):
    """A matrix that must be traceless is not."""


@dataclass
class DistanceSeries:
    t: np.ndarray
    trace_distance: np.ndarray
    hs_distance: np.ndarray


def difference_matrix(
    config: ModelConfig, t: float, a_corr_value: complex, a_marg_value: complex
) -> QubitMatrix:
    """M(t) = rho_corr(t) - rho_marg(t), traceless and Hermitian."""
    rc = reduced_density(config, t, a_corr_value)
    rm = reduced_density(config, t, a_marg_value)
    return QubitMatrix(
        m00=rc.m00 - rm.m00,
        m01=rc.m01 - rm.m01,
        m10=rc.m10 - rm.m10,
        m11=rc.m11 - rm.m11,
    )


def _check_structure(m: QubitMatrix) -> tuple[float, complex]:
    scale = max(abs(m.m00), abs(m.m01), abs(m.m10), abs(m.m11), 1.0)
    if abs(m.m00.imag) > _TOL * scale or abs(m.m11.imag) > _TOL * scale:
        raise NonHermitianInput("diagonal entries must be real")
    if abs(m.m01 - complex(m.m10).conjugate()) > _TOL * scale:
        raise NonHermitianInput("off-diagonal entries must be conjugate")
    if abs(m.m00 + m.m11) > _TOL * scale:
        raise NotTraceless(f"trace is {m.m00 + m.m11}")
    return float(m.m00.real), complex(m.m10)


def trace_distance_qubit(m: QubitMatrix) -> float:
    """Half trace norm of a traceless Hermitian 2x2 matrix.

    The eigenvalues come in a +/- pair, so D = sqrt(a^2 + |b|^2) exactly.
    """
    a, b = _check_structure(m)
    return math.hypot(a, abs(b))


def hs_distance_qubit(m: QubitMatrix) -> float:
    """Hilbert-Schmidt (Frobenius) norm; sqrt(2) times the trace distance here."""
    a, b = _check_structure(m)
    return math.sqrt(2.0) * math.hypot(a, abs(b))


def distance_series(
    config: ModelConfig, corr: ComplexSeries, marg: ComplexSeries
) -> DistanceSeries:
    """Trace and Hilbert-Schmidt distance on the common grid of two responses."""
    if len(corr) != len(marg) or not np.array_equal(corr.t, marg.t):
        raise GridMismatch("response series are on different time grids")
    half_eps = 0.5 * config.field_prefactor
    d = half_eps * np.abs(corr.values - marg.values)
    return DistanceSeries(
        t=corr.t.copy(), trace_distance=d, hs_distance=math.sqrt(2.0) * d
    )
