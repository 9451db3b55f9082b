import math

import numpy as np
import pytest

from corrtrace.correlations import (
    TailTooLarge,
    bose_occupation,
    decoherence_exponent,
    decoherence_exponent_grid,
    exponent_series_ohmic,
    phase_exponent,
    psi1,
    psi1_grid,
    psi2,
    thermal_factor,
)
from corrtrace.model import DiscreteBath, OhmicBath


OHMIC = OhmicBath(s=1.0, omega_c=0.2)


def test_bose_occupation_and_thermal_factor():
    # n(w) = 1/(e^{bw} - 1); 1 + 2n = coth(bw/2)
    assert bose_occupation(1.0, 2.0) == pytest.approx(1.0 / math.expm1(2.0), rel=1e-14)
    assert thermal_factor(1.0, 1.0) == pytest.approx(1.0 / math.tanh(0.5), rel=1e-14)
    assert thermal_factor(1.0, math.inf) == 1.0
    with pytest.raises(ValueError):
        bose_occupation(1.0, 0.0)


@pytest.mark.parametrize("s", [0.05, 0.5, 1.0])
@pytest.mark.parametrize("t", [0.3, 5.0, 60.0])
def test_zero_temperature_closed_form(s, t):
    bath = OhmicBath(s=s, omega_c=0.2)
    g = decoherence_exponent(bath, math.inf, t)
    assert g.real == pytest.approx(0.5 * s * math.log1p((0.2 * t) ** 2), abs=1e-10)
    assert g.imag == pytest.approx(s * math.atan(0.2 * t), abs=1e-12)


def test_phase_exponent_discrete_matches_mode_sum():
    bath = DiscreteBath(modes=((0.3, 0.8), (0.1, 1.5)))
    t = np.array([0.0, 1.2, 7.0])
    expected = sum((g / w) ** 2 * np.sin(w * t) for g, w in bath.modes)
    assert np.allclose(phase_exponent(bath, t), expected, rtol=0, atol=1e-14)


def test_discrete_exponent_single_mode_formula():
    g_k, w_k, beta = 0.3, 0.8, 2.0
    bath = DiscreteBath(modes=((g_k, w_k),))
    t = 3.7
    lam = (g_k / w_k) ** 2
    expected_re = lam * (1.0 / math.tanh(0.5 * beta * w_k)) * (1.0 - math.cos(w_k * t))
    expected_im = lam * math.sin(w_k * t)
    g = decoherence_exponent(bath, beta, t)
    assert g.real == pytest.approx(expected_re, rel=1e-13)
    assert g.imag == pytest.approx(expected_im, rel=1e-13)


def test_grid_matches_scalar():
    t = np.array([0.0, 0.5, 2.0, 11.0])
    grid = decoherence_exponent_grid(OHMIC, 1.0, t)
    for i, ti in enumerate(t):
        assert grid[i] == pytest.approx(decoherence_exponent(OHMIC, 1.0, float(ti)), rel=1e-9)
    assert grid[0] == 0.0


def test_trivial_bath_exponent_is_zero():
    t = np.linspace(0.0, 30.0, 7)
    assert np.array_equal(decoherence_exponent_grid(OhmicBath(s=0.0, omega_c=0.2), 1.0, t), np.zeros(7))
    assert np.array_equal(
        decoherence_exponent_grid(DiscreteBath(modes=((0.0, 0.8),)), 1.0, t), np.zeros(7)
    )
    assert np.all(psi1_grid(OhmicBath(s=0.0, omega_c=0.2), 1.0, t) == 1.0)


def test_series_route_agrees_with_quadrature():
    for beta in (0.1, 1.0, 5.0):
        for t in (0.5, 10.0, 100.0):
            gq = decoherence_exponent(OHMIC, beta, t)
            gs = exponent_series_ohmic(1.0, 0.2, beta, t)
            assert abs(gq - gs) / abs(gs) < 1e-9


def test_series_tail_bound_enforced():
    with pytest.raises(TailTooLarge) as exc:
        exponent_series_ohmic(1.0, 0.2, 0.1, 10.0, k_max=1, tail_tol=1e-14)
    assert exc.value.bound > 0


def test_infinite_temperature_limit():
    g = decoherence_exponent(OHMIC, 0.0, 2.0)
    assert g.real == math.inf
    assert g.imag == pytest.approx(math.atan(0.4), rel=1e-14)
    assert psi1(OHMIC, 0.0, 2.0) == 0.0
    assert psi1(OHMIC, 0.0, 0.0) == 1.0


def test_psi2_invariants():
    for t, tp in ((4.0, 4.0), (9.0, 2.5), (30.0, 29.0)):
        p2 = psi2(OHMIC, 1.0, t, tp)
        if t == tp:
            assert p2 == pytest.approx(1.0, abs=1e-12)
        assert abs(p2) == pytest.approx(abs(psi1(OHMIC, 1.0, t - tp)), rel=1e-12)


def test_psi2_requires_ordered_times():
    with pytest.raises(ValueError):
        psi2(OHMIC, 1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        psi2(OHMIC, 1.0, 1.0, -0.5)


def test_exponent_grid_rejects_bad_times():
    with pytest.raises(ValueError):
        decoherence_exponent_grid(OHMIC, 1.0, [-1.0, 0.0])
    with pytest.raises(ValueError):
        decoherence_exponent_grid(OHMIC, 1.0, [0.0, math.inf])
