import math

import numpy as np
import pytest

from corrtrace.distance import (
    GridMismatch,
    NonHermitianInput,
    NotTraceless,
    difference_matrix,
    distance_series,
    hs_distance_qubit,
    trace_distance_qubit,
)
from corrtrace.dynamics import QubitMatrix, response_pair
from corrtrace.numerics import ComplexSeries


def test_trace_distance_closed_form():
    # eigenvalues of [[a, b], [b*, -a]] are +/- sqrt(a^2 + |b|^2)
    m = QubitMatrix(m00=0.3, m01=0.1 - 0.2j, m10=0.1 + 0.2j, m11=-0.3)
    expected = math.sqrt(0.3**2 + 0.1**2 + 0.2**2)
    assert trace_distance_qubit(m) == pytest.approx(expected, rel=1e-14)
    assert hs_distance_qubit(m) == pytest.approx(math.sqrt(2.0) * expected, rel=1e-14)


def test_structure_validation():
    with pytest.raises(NonHermitianInput):
        trace_distance_qubit(QubitMatrix(m00=0.1j, m01=0.0, m10=0.0, m11=0.0))
    with pytest.raises(NonHermitianInput):
        trace_distance_qubit(QubitMatrix(m00=0.1, m01=0.2j, m10=0.2j, m11=-0.1))
    with pytest.raises(NotTraceless):
        trace_distance_qubit(QubitMatrix(m00=0.4, m01=0.0, m10=0.0, m11=0.4))


def test_difference_matrix_is_coherence_only(ohmic_config):
    cfg = ohmic_config()
    m = difference_matrix(cfg, 2.5, 0.4 + 0.1j, 0.35 - 0.05j)
    assert m.m00 == 0.0 and m.m11 == 0.0
    assert m.m01 == complex(m.m10).conjugate()
    gap = (0.4 + 0.1j) - (0.35 - 0.05j)
    assert abs(m.m10) == pytest.approx(0.5 * cfg.field_prefactor * abs(gap), rel=1e-13)
    assert trace_distance_qubit(m) == pytest.approx(abs(m.m10), rel=1e-14)


def test_distance_series_matches_pointwise(ohmic_config):
    cfg = ohmic_config(n_steps=201, t_max=20.0)
    corr, marg = response_pair(cfg)
    ds = distance_series(cfg, corr, marg)
    direct = 0.5 * cfg.field_prefactor * np.abs(corr.values - marg.values)
    assert np.array_equal(ds.trace_distance, direct)
    assert np.allclose(ds.hs_distance, math.sqrt(2.0) * direct, rtol=1e-15, atol=0)
    assert ds.trace_distance[0] == 0.0

    # spot check against the matrix route
    i = 57
    m = difference_matrix(cfg, float(corr.t[i]), complex(corr.values[i]), complex(marg.values[i]))
    assert ds.trace_distance[i] == pytest.approx(trace_distance_qubit(m), rel=1e-13)


def test_distance_series_grid_mismatch(ohmic_config):
    cfg = ohmic_config(n_steps=101, t_max=10.0)
    corr, marg = response_pair(cfg)
    other = ComplexSeries(t=corr.t * 2.0, values=marg.values)
    with pytest.raises(GridMismatch):
        distance_series(cfg, corr, other)
    with pytest.raises(GridMismatch):
        distance_series(cfg, corr, ComplexSeries(t=corr.t[:-1], values=marg.values[:-1]))
