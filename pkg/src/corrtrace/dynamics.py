"""First-order response of the dephasing qubit to a suddenly applied probe.

The probe couples through H_P(t) = -(eps/2) (sigma_+ e^{-i w_p t} + h.c.),
switched on at t = 0 with eps = field_prefactor.  To first order in eps the
populations stay at their initial Gibbs values and the coherence is

    rho_10(t) = i (eps/2) e^{-i w_p t} A(t),

where A depends on the initial state.  With dw the probe detuning from the
renormalized gap and p0, p1 the thermal weights:

* correlated initial state (global Gibbs):

      A_corr(t) = int_0^t du e^{-i dw u} [ p0 Psi_1(u) - p1 Psi_1*(u) ]

* factorized initial state (marginal of system times marginal of bath):

      A_marg(t) = int_0^t du e^{-i dw u}
                  [ p0 (p0 Psi_1(u) + p1 Psi_2(t, t-u))
                  - p1 (p0 Psi_2*(t, t-u) + p1 Psi_1*(u)) ]

A_corr is a plain cumulative integral.  A_marg is computed as A_corr plus
a correction whose integrand carries the factor (e^{i(phi(t)-phi(t-u))}-1),
so the two coincide exactly (not just to quadrature accuracy) whenever the
boundary phase phi = 2 Im Gamma vanishes, i.e. for an uncoupled bath.  The
correction is the package's only O(n^2) computation and runs through the
compiled kernel when available.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .correlations import phase_exponent, psi1_grid
from .model import DiscreteBath, ModelConfig, OhmicBath, detuning, thermal_weights
from .numerics import (
    ComplexSeries,
    GridTooCoarse,
    QuadratureSettings,
    cumulative_integral,
    uniform_spacing,
)

__all__ = [
    "QubitMatrix",
    "DipoleSignal",
    "a_corr",
    "a_marg",
    "response_pair",
    "reduced_density",
    "dipole_signal",
]

# max phase advance per grid step before the cumulative rule degrades
_MAX_STEP_PHASE = 1.5


@dataclass(frozen=True)
class QubitMatrix:
    """A 2x2 operator on the qubit, stored entrywise."""

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]], dtype=complex)

    @classmethod
    def from_array(cls, m: np.ndarray) -> "QubitMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {m.shape}")
        return cls(m00=m[0, 0], m01=m[0, 1], m10=m[1, 0], m11=m[1, 1])

    def trace(self) -> complex:
        return self.m00 + self.m11


@dataclass
class DipoleSignal:
    """Observable columns derived from a response series.

    amplitude = eps |A|, phase = unwrapped arg A, signal = the real dipole
    oscillation 2 Re rho_10, intensity = amplitude^2.
    """

    t: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    signal: np.ndarray
    intensity: np.ndarray


def _phase_rate_bound(config: ModelConfig) -> float:
    bath = config.bath
    if isinstance(bath, OhmicBath):
        return 2.0 * bath.s * bath.omega_c
    if isinstance(bath, DiscreteBath):
        return 2.0 * float(np.sum(bath.couplings() ** 2 / bath.frequencies()))
    raise TypeError(f"unsupported bath type {type(bath).__name__}")


def _check_sampling(config: ModelConfig, h: float) -> None:
    rate = abs(detuning(config)) + _phase_rate_bound(config)
    if rate * h > _MAX_STEP_PHASE:
        raise GridTooCoarse(
            f"grid step {h:.4g} advances the integrand phase by"
            f" {rate * h:.3g} rad per step (limit {_MAX_STEP_PHASE});"
            " increase n_steps"
        )


def _resolve_grid(config: ModelConfig, t_grid) -> np.ndarray:
    if t_grid is None:
        return config.time_grid()
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise GridTooCoarse("need a 1-D grid with at least 2 points")
    if t[0] != 0.0:
        raise ValueError(f"time grid must start at 0, got t[0]={t[0]}")
    if not np.all(np.diff(t) > 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _corr_integrand(
    config: ModelConfig,
    t: np.ndarray,
    settings: Optional[QuadratureSettings],
    psi1_values: Optional[np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    if psi1_values is None:
        psi1_values = psi1_grid(config.bath, config.beta, t, settings)
    w = thermal_weights(config)
    exp_dw = np.exp(-1j * detuning(config) * t)
    g = exp_dw * (w.p0 * psi1_values - w.p1 * psi1_values.conj())
    return g, psi1_values


def a_corr(
    config: ModelConfig,
    t_grid=None,
    settings: Optional[QuadratureSettings] = None,
    psi1_values: Optional[np.ndarray] = None,
) -> ComplexSeries:
    """Response for the correlated (global Gibbs) initial state.

    Works on any strictly increasing grid starting at 0; pass psi1_values
    to reuse a precomputed Psi_1 table on the same grid.
    """
    t = _resolve_grid(config, t_grid)
    h = uniform_spacing(t)
    if h is not None:
        _check_sampling(config, h)
    g, _ = _corr_integrand(config, t, settings, psi1_values)
    return cumulative_integral(ComplexSeries(t=t, values=g))


def a_marg(
    config: ModelConfig,
    t_grid=None,
    settings: Optional[QuadratureSettings] = None,
) -> ComplexSeries:
    """Response for the factorized initial state; uniform grids only."""
    return response_pair(config, t_grid, settings)[1]


def response_pair(
    config: ModelConfig,
    t_grid=None,
    settings: Optional[QuadratureSettings] = None,
) -> tuple[ComplexSeries, ComplexSeries]:
    """(A_corr, A_marg) on the same grid, sharing one Psi_1 table.

    The factorized-state response needs the two-time envelope, evaluated
    lag-by-lag on the grid, so the grid must be uniform.
    """
    t = _resolve_grid(config, t_grid)
    h = uniform_spacing(t)
    if h is None:
        raise GridTooCoarse("the factorized-state response needs a uniform grid")
    _check_sampling(config, h)

    g, psi1_values = _corr_integrand(config, t, settings, None)
    corr = cumulative_integral(ComplexSeries(t=t, values=g))

    w = thermal_weights(config)
    exp_dw = np.exp(-1j * detuning(config) * t)
    cphase = np.exp(2j * phase_exponent(config.bath, t))
    delta = kernels.marg_correction(exp_dw, psi1_values, cphase, h, w.p0 * w.p1)
    marg = ComplexSeries(t=t, values=corr.values + delta)
    return corr, marg


def reduced_density(config: ModelConfig, t: float, a_value: complex) -> QubitMatrix:
    """First-order reduced density matrix at time t given the response value.

    Populations keep their Gibbs weights (the probe changes them only at
    second order); the coherence is rho_10 = i (eps/2) e^{-i w_p t} A(t).
    """
    w = thermal_weights(config)
    m10 = 0.5j * config.field_prefactor * np.exp(-1j * config.omega_p * t) * a_value
    return QubitMatrix(m00=w.p0, m01=complex(m10).conjugate(), m10=complex(m10), m11=w.p1)


def dipole_signal(series: ComplexSeries, config: ModelConfig) -> DipoleSignal:
    """Observable dipole columns for a response series."""
    eps = config.field_prefactor
    a = series.values
    amplitude = eps * np.abs(a)
    phase = np.unwrap(np.angle(a))
    rho10 = 0.5j * eps * np.exp(-1j * config.omega_p * series.t) * a
    signal = 2.0 * rho10.real
    return DipoleSignal(
        t=series.t.copy(),
        amplitude=amplitude,
        phase=phase,
        signal=signal,
        intensity=amplitude**2,
    )
