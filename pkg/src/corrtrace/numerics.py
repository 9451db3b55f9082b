"""Quadrature and grid utilities.

Two jobs live here:

* adaptive Gauss-Kronrod (7, 15) panel integration of smooth, oscillatory
  integrands on [0, inf) that decay exponentially past a known scale, and
* a second-order-accurate cumulative integral on a (possibly non-uniform)
  time grid, plus a streaming variant for integrands produced one grid
  point at a time.

The cumulative rule integrates the parabola through three neighbouring
samples over each segment.  On a uniform grid with spacing h this is

    C_1 = h (5 f_0 + 8 f_1 - f_2) / 12
    C_k = C_{k-1} + h (-f_{k-2} + 8 f_{k-1} + 5 f_k) / 12      (k >= 2)

so C_2 reproduces Simpson's rule exactly.  Both the vectorized and the
streaming implementation use these same coefficients; tests pin their
agreement so downstream consumers can mix them freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np

__all__ = [
    "QuadratureSettings",
    "ComplexSeries",
    "ToleranceNotMet",
    "NonFinite",
    "GridTooCoarse",
    "integrate_semi_infinite",
    "integrate_semi_infinite_batch",
    "cumulative_integral",
    "CumulativeIntegrator",
    "uniform_spacing",
]


class ToleranceNotMet(RuntimeError):
    """Quadrature could not reach the requested tolerance.

    The error estimate actually achieved is available as `achieved_error`.
    """

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class NonFinite(RuntimeError):
    """An integrand returned nan or inf."""


class GridTooCoarse(ValueError):
    """A time grid is too short or undersamples the integrand's oscillation."""


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 4096
    panel_policy: Literal["oscillation-aware", "fixed"] = "oscillation-aware"

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 4:
            raise ValueError("max_subdivisions must be at least 4")


@dataclass
class ComplexSeries:
    """A complex-valued function sampled on a strictly increasing time grid.

    Arrays are copied on construction and frozen; treat instances as
    immutable values.
    """

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=complex)
        if t.ndim != 1 or v.ndim != 1:
            raise ValueError("t and values must be one-dimensional")
        if t.size != v.size:
            raise ValueError(f"length mismatch: {t.size} times, {v.size} values")
        if t.size == 0:
            raise ValueError("series must not be empty")
        if not np.all(np.isfinite(t)):
            raise ValueError("time grid contains non-finite entries")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("time grid must be strictly increasing")
        t.flags.writeable = False
        v.flags.writeable = False
        self.t = t
        self.values = v

    def __len__(self) -> int:
        return int(self.t.size)


# Gauss-Kronrod (7, 15) nodes and weights on [-1, 1].  The 7-point Gauss
# rule is embedded at every second Kronrod node.
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# Full 15-node layout, sorted ascending, with the Gauss weights placed at
# the embedded nodes and zero elsewhere.
_X15 = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_W15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_G15 = np.zeros(15)
_G15[1:7:2] = _WG[:3]
_G15[7] = _WG[3]
_G15[9::2] = _WG[2::-1]

# cap on per-chunk scratch size (elements) when evaluating panel batches
_CHUNK_ELEMS = 2_000_000


def _eval_panels(
    fmat: Callable[[np.ndarray], np.ndarray],
    centers: np.ndarray,
    half_widths: np.ndarray,
    n_rows: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the GK15 rule to a batch of panels.

    Returns (integrals, errors): integrals has shape (n_panels, n_rows),
    errors shape (n_panels,) holding the max error estimate over rows.
    The error estimate follows the usual Kronrod practice of scaling
    |K - G| by the panel's total variation measure, which guards against
    accidental agreement of the two rules.
    """
    n_panels = centers.size
    integrals = np.empty((n_panels, n_rows), dtype=complex)
    errors = np.empty(n_panels, dtype=float)
    per = max(1, _CHUNK_ELEMS // (15 * n_rows))
    for i0 in range(0, n_panels, per):
        sl = slice(i0, min(i0 + per, n_panels))
        c = centers[sl]
        hw = half_widths[sl]
        x = c[:, None] + hw[:, None] * _X15
        vals = np.asarray(fmat(x.ravel()), dtype=complex).reshape(n_rows, c.size, 15)
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))
            omega = x.reshape(c.size, 15)[bad[0][1], bad[0][2]]
            raise NonFinite(f"integrand returned a non-finite value near omega={omega:.6g}")
        resk = vals @ _W15
        resg = vals @ _G15
        resasc = (np.abs(vals - 0.5 * resk[..., None]) @ _W15) * hw
        raw = np.abs(resk - resg) * hw
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * raw / resasc) ** 1.5)
        err = np.where((resasc > 0) & (raw > 0), scaled, raw)
        integrals[sl] = (resk * hw).T
        errors[sl] = err.max(axis=0)
    return integrals, errors


def _adaptive_semi_infinite(
    fmat: Callable[[np.ndarray], np.ndarray],
    n_rows: int,
    decay_scale: float,
    osc_period: Optional[float],
    settings: QuadratureSettings,
) -> np.ndarray:
    if not (decay_scale > 0 and math.isfinite(decay_scale)):
        raise ValueError(f"decay_scale must be positive and finite, got {decay_scale}")

    # Size the truncated domain from a probe of the integrand's envelope:
    # assume |f| <~ M exp(-omega/decay_scale) beyond the probe points and
    # push the analytic tail bound below the absolute tolerance.
    probe = decay_scale * np.array([0.5, 1.0, 2.0, 3.0, 5.0, 8.0])
    pv = np.abs(np.asarray(fmat(probe), dtype=complex)).reshape(n_rows, probe.size)
    if not np.all(np.isfinite(pv)):
        raise NonFinite("integrand returned a non-finite value at a probe point")
    envelope = float(np.max(pv * np.exp(probe / decay_scale)))
    tail_target = 0.05 * settings.abs_tol
    if envelope <= 0.0:
        omega_max = 8.0 * decay_scale
        tail_bound = 0.0
    else:
        omega_max = decay_scale * math.log1p(envelope * decay_scale / tail_target)
        omega_max = min(max(omega_max, 8.0 * decay_scale), 200.0 * decay_scale)
        tail_bound = envelope * decay_scale * math.exp(-omega_max / decay_scale)

    if (
        settings.panel_policy == "oscillation-aware"
        and osc_period is not None
        and math.isfinite(osc_period)
        and osc_period > 0
    ):
        width = min(decay_scale, 0.5 * osc_period)
    else:
        width = decay_scale
    n_init = max(4, int(math.ceil(omega_max / width)))
    if n_init > settings.max_subdivisions:
        raise ToleranceNotMet(
            f"initial paneling needs {n_init} panels, over the"
            f" max_subdivisions={settings.max_subdivisions} budget",
            achieved_error=math.inf,
        )
    edges = np.linspace(0.0, omega_max, n_init + 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    half_widths = 0.5 * np.diff(edges)

    integrals, errors = _eval_panels(fmat, centers, half_widths, n_rows)
    evaluated = n_init
    while True:
        total = integrals.sum(axis=0)
        scale = float(np.max(np.abs(total)))
        threshold = max(settings.abs_tol, settings.rel_tol * scale)
        total_err = float(errors.sum()) + tail_bound
        if total_err <= threshold:
            return total
        per_panel = threshold / (2.0 * errors.size)
        bad = errors > per_panel
        if not np.any(bad) or evaluated + 2 * int(bad.sum()) > settings.max_subdivisions:
            # nothing left to split (tail-dominated) or budget exhausted
            raise ToleranceNotMet("quadrature did not converge", achieved_error=total_err)
        c_bad, h_bad = centers[bad], half_widths[bad]
        new_centers = np.concatenate([c_bad - 0.5 * h_bad, c_bad + 0.5 * h_bad])
        new_halves = np.concatenate([0.5 * h_bad, 0.5 * h_bad])
        new_int, new_err = _eval_panels(fmat, new_centers, new_halves, n_rows)
        evaluated += new_centers.size
        centers = np.concatenate([centers[~bad], new_centers])
        half_widths = np.concatenate([half_widths[~bad], new_halves])
        integrals = np.concatenate([integrals[~bad], new_int])
        errors = np.concatenate([errors[~bad], new_err])


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    decay_scale: float,
    osc_period: Optional[float] = None,
    settings: Optional[QuadratureSettings] = None,
) -> complex:
    """Integrate f over [0, inf) for integrands decaying like exp(-omega/decay_scale).

    f must accept a 1-D array of frequencies and return values of the same
    shape.  osc_period, when given, is the period in omega of the fastest
    oscillation (2 pi / t for a factor exp(i omega t)); panels are kept at
    most half a period wide so the embedded rule stays accurate.  Raises
    ToleranceNotMet or NonFinite on failure; never returns a value that
    missed the requested tolerance.
    """
    st = settings or QuadratureSettings()

    def fmat(omega: np.ndarray) -> np.ndarray:
        return np.asarray(f(omega), dtype=complex)[None, :]

    total = _adaptive_semi_infinite(fmat, 1, decay_scale, osc_period, st)
    return complex(total[0])


def integrate_semi_infinite_batch(
    f: Callable[[np.ndarray], np.ndarray],
    n_rows: int,
    decay_scale: float,
    osc_period: Optional[float] = None,
    settings: Optional[QuadratureSettings] = None,
) -> np.ndarray:
    """Batched variant: f(omega) returns shape (n_rows, omega.size).

    All rows share one adaptive panel set; the error control uses the worst
    row per panel, and the relative tolerance is taken against the largest
    row magnitude.  Returns an (n_rows,) complex array.
    """
    st = settings or QuadratureSettings()

    def fmat(omega: np.ndarray) -> np.ndarray:
        out = np.asarray(f(omega), dtype=complex)
        if out.shape != (n_rows, omega.size):
            raise ValueError(
                f"batch integrand returned shape {out.shape},"
                f" expected {(n_rows, omega.size)}"
            )
        return out

    return _adaptive_semi_infinite(fmat, n_rows, decay_scale, osc_period, st)


def _segment_weights(
    x0: np.ndarray, x1: np.ndarray, x2: np.ndarray, xl: np.ndarray, xr: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrals over [xl, xr] of the Lagrange basis on nodes (x0, x1, x2)."""
    width = xr - xl

    def basis(a: np.ndarray, b: np.ndarray, denom: np.ndarray) -> np.ndarray:
        # integral of (x - a)(x - b) over the segment, in u = x - xl
        al = xl - a
        bl = xl - b
        return width * (width * width / 3.0 + (al + bl) * width / 2.0 + al * bl) / denom

    w0 = basis(x1, x2, (x0 - x1) * (x0 - x2))
    w1 = basis(x0, x2, (x1 - x0) * (x1 - x2))
    w2 = basis(x0, x1, (x2 - x0) * (x2 - x1))
    return w0, w1, w2


def cumulative_integral(series: ComplexSeries) -> ComplexSeries:
    """Cumulative integral of a sampled function, C(t_j) = int_0^{t_j} (from t_0).

    Second-order accurate on non-uniform grids (exact for quadratics): each
    segment integrates the parabola through its three nearest samples.  The
    first segment borrows the point after it; a two-point series falls back
    to the trapezoid.  Needs at least two points.
    """
    t, v = series.t, series.values
    n = t.size
    if n < 2:
        raise GridTooCoarse("cumulative integral needs at least 2 grid points")
    if n == 2:
        seg = 0.5 * (t[1] - t[0]) * (v[0] + v[1])
        return ComplexSeries(t=t, values=np.array([0.0, seg], dtype=complex))

    segments = np.empty(n - 1, dtype=complex)
    w0, w1, w2 = _segment_weights(t[0], t[1], t[2], t[0], t[1])
    segments[0] = w0 * v[0] + w1 * v[1] + w2 * v[2]
    x0, x1, x2 = t[:-2], t[1:-1], t[2:]
    w0, w1, w2 = _segment_weights(x0, x1, x2, x1, x2)
    segments[1:] = w0 * v[:-2] + w1 * v[1:-1] + w2 * v[2:]

    out = np.empty(n, dtype=complex)
    out[0] = 0.0
    np.cumsum(segments, out=out[1:])
    return ComplexSeries(t=t, values=out)


class CumulativeIntegrator:
    """Streaming form of `cumulative_integral` for a uniform grid.

    Feed sample values (scalars or ndarrays, any fixed shape) one grid point
    at a time; `push` returns the list of (index, cumulative value) pairs
    that became available.  The first segment needs one point of lookahead,
    so indices 1 and 2 are emitted together with the third push.  Keeps only
    three samples in memory, which is what makes integrating matrix-valued
    integrands on long grids affordable.
    """

    def __init__(self, spacing: float):
        if not spacing > 0:
            raise ValueError(f"grid spacing must be positive, got {spacing}")
        self.h = spacing
        self._count = 0
        self._f_prev2 = None
        self._f_prev = None
        self._cum = None

    def push(self, value) -> list[tuple[int, np.ndarray]]:
        value = np.asarray(value, dtype=complex)
        h = self.h
        out: list[tuple[int, np.ndarray]] = []
        j = self._count
        self._count += 1
        if j == 0:
            self._f_prev2 = value
            self._cum = np.zeros_like(value)
            return [(0, self._cum.copy())]
        if j == 1:
            self._f_prev = value
            return []
        f0, f1, f2 = self._f_prev2, self._f_prev, value
        if j == 2:
            c1 = self._cum + h * (5.0 * f0 + 8.0 * f1 - f2) / 12.0
            c2 = c1 + h * (-f0 + 8.0 * f1 + 5.0 * f2) / 12.0
            out.append((1, c1))
            out.append((2, c2.copy()))
            self._cum = c2
        else:
            c = self._cum + h * (-f0 + 8.0 * f1 + 5.0 * f2) / 12.0
            out.append((j, c.copy()))
            self._cum = c
        self._f_prev2 = f1
        self._f_prev = f2
        return out


def uniform_spacing(t: np.ndarray, rel_tol: float = 1e-8) -> Optional[float]:
    """Spacing of a uniform grid, or None if the grid is not uniform."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        return None
    diffs = np.diff(t)
    h = float(diffs.mean())
    if h <= 0 or np.max(np.abs(diffs - h)) > rel_tol * h:
        return None
    return h
