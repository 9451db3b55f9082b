import math

import numpy as np
import pytest

from corrtrace.numerics import (
    ComplexSeries,
    CumulativeIntegrator,
    GridTooCoarse,
    NonFinite,
    QuadratureSettings,
    ToleranceNotMet,
    cumulative_integral,
    integrate_semi_infinite,
    integrate_semi_infinite_batch,
    uniform_spacing,
)


def test_series_validation():
    with pytest.raises(ValueError):
        ComplexSeries(t=np.array([[0.0, 1.0]]), values=np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        ComplexSeries(t=np.array([0.0, 1.0]), values=np.array([1.0]))
    with pytest.raises(ValueError):
        ComplexSeries(t=np.array([0.0, 0.0]), values=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        ComplexSeries(t=np.array([0.0, np.nan]), values=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        ComplexSeries(t=np.array([]), values=np.array([]))


def test_series_is_frozen_copy():
    t = np.array([0.0, 1.0])
    s = ComplexSeries(t=t, values=np.array([1.0, 2.0]))
    t[0] = 99.0
    assert s.t[0] == 0.0
    assert not s.t.flags.writeable
    assert not s.values.flags.writeable
    assert len(s) == 2


def test_exponential_integral():
    v = integrate_semi_infinite(lambda w: np.exp(-w), decay_scale=1.0)
    assert v == pytest.approx(1.0, abs=1e-12)
    v = integrate_semi_infinite(lambda w: w * np.exp(-w / 2.0), decay_scale=2.0)
    assert v == pytest.approx(4.0, rel=1e-11)


@pytest.mark.parametrize("t", [0.5, 7.0, 40.0])
def test_oscillatory_laplace_transforms(t):
    # int_0^inf e^{-w} cos(wt) dw = 1/(1+t^2), sin -> t/(1+t^2)
    period = 2.0 * math.pi / t
    vc = integrate_semi_infinite(
        lambda w: np.exp(-w) * np.cos(w * t), decay_scale=1.0, osc_period=period
    )
    vs = integrate_semi_infinite(
        lambda w: np.exp(-w) * np.sin(w * t), decay_scale=1.0, osc_period=period
    )
    assert vc == pytest.approx(1.0 / (1.0 + t * t), abs=1e-11)
    assert vs == pytest.approx(t / (1.0 + t * t), abs=1e-11)


def test_batch_matches_scalar():
    ts = np.array([1.0, 3.0, 9.0])

    def rows(w):
        return np.exp(-w)[None, :] * np.cos(np.outer(ts, w))

    got = integrate_semi_infinite_batch(
        rows, n_rows=3, decay_scale=1.0, osc_period=2.0 * math.pi / ts[-1]
    )
    assert np.allclose(got, 1.0 / (1.0 + ts**2), rtol=0, atol=1e-11)


def test_paneling_budget_exhaustion():
    st = QuadratureSettings(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=4)
    with pytest.raises(ToleranceNotMet):
        integrate_semi_infinite(
            lambda w: np.abs(np.sin(40.0 * w)) * np.exp(-w), decay_scale=1.0, settings=st
        )


def test_split_budget_exhaustion_reports_error():
    st = QuadratureSettings(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=64)
    with pytest.raises(ToleranceNotMet) as exc:
        integrate_semi_infinite(
            lambda w: np.abs(np.sin(40.0 * w)) * np.exp(-w), decay_scale=1.0, settings=st
        )
    assert math.isfinite(exc.value.achieved_error)
    assert exc.value.achieved_error > 0


def test_non_finite_integrand_rejected():
    with pytest.raises(NonFinite):
        integrate_semi_infinite(
            lambda w: np.where(w > 2.0, np.nan, 1.0) * np.exp(-w), decay_scale=1.0
        )


def test_cumulative_exact_for_quadratics_nonuniform():
    rng = np.random.default_rng(7)
    t = np.sort(rng.uniform(0.0, 5.0, size=40))
    t[0] = 0.0
    f = 3.0 * t * t - 2.0 * t + 1.0
    exact = t**3 - t**2 + t
    out = cumulative_integral(ComplexSeries(t=t, values=f))
    assert np.allclose(out.values.real, exact, rtol=0, atol=1e-12)
    assert np.allclose(out.values.imag, 0.0, atol=1e-14)


def test_cumulative_two_points_is_trapezoid():
    out = cumulative_integral(ComplexSeries(t=[0.0, 2.0], values=[1.0, 3.0]))
    assert out.values[0] == 0.0
    assert out.values[1] == pytest.approx(4.0)


def test_cumulative_single_point_rejected():
    with pytest.raises(GridTooCoarse):
        cumulative_integral(ComplexSeries(t=[0.0], values=[1.0]))


def test_cumulative_third_order_convergence():
    def run(n):
        t = np.linspace(0.0, 1.0, n)
        out = cumulative_integral(ComplexSeries(t=t, values=np.exp(t)))
        return float(np.max(np.abs(out.values - (np.exp(t) - 1.0))))

    e1, e2 = run(101), run(201)
    assert e1 < 1e-7
    assert e1 / e2 > 6.0  # one halving of h should shrink the error ~8x


def test_streaming_matches_vectorized():
    rng = np.random.default_rng(11)
    n, h = 57, 0.13
    t = h * np.arange(n)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    ref = cumulative_integral(ComplexSeries(t=t, values=v)).values

    stream = CumulativeIntegrator(h)
    got = np.empty(n, dtype=complex)
    for x in v:
        for idx, val in stream.push(x):
            got[idx] = val
    assert np.allclose(got, ref, rtol=0, atol=1e-14 * max(1.0, np.max(np.abs(ref))))


def test_streaming_emission_schedule():
    stream = CumulativeIntegrator(0.5)
    first = stream.push(1.0)
    assert [i for i, _ in first] == [0]
    assert stream.push(2.0) == []
    third = stream.push(3.0)
    assert [i for i, _ in third] == [1, 2]
    fourth = stream.push(4.0)
    assert [i for i, _ in fourth] == [3]


def test_streaming_matrix_values():
    h = 0.25
    n = 21
    t = h * np.arange(n)
    mats = [np.array([[np.cos(x), np.sin(x)], [x, 1.0]], dtype=complex) for x in t]

    stream = CumulativeIntegrator(h)
    got = {}
    for m in mats:
        for idx, val in stream.push(m):
            got[idx] = val

    for a in range(2):
        for b in range(2):
            comp = np.array([m[a, b] for m in mats])
            ref = cumulative_integral(ComplexSeries(t=t, values=comp)).values
            col = np.array([got[i][a, b] for i in range(n)])
            assert np.allclose(col, ref, rtol=0, atol=1e-14)


def test_uniform_spacing_detection():
    assert uniform_spacing(np.linspace(0.0, 1.0, 11)) == pytest.approx(0.1)
    jitter = np.array([0.0, 0.1, 0.25, 0.3])
    assert uniform_spacing(jitter) is None
    assert uniform_spacing(np.array([0.0])) is None


def test_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSettings(max_subdivisions=2)
