"""Bath correlation functions for pure dephasing.

Everything here reduces to the decoherence exponent

    Gamma(t) = int_0^inf domega  h(omega)/omega^2
               * [ (1 + 2 n(omega)) (1 - cos omega t) + i sin omega t ]

with n(omega) the Bose occupation at inverse temperature beta, plus the two
single- and two-time envelope functions built from it:

    Psi_1(t)      = exp(-Gamma(t))
    Psi_2(t, t')  = Psi_1(t - t') * exp(2i [Im Gamma(t) - Im Gamma(t')])

The two-time function factorizes like this for any bath because the second
cumulant of the displaced bath operators splits into a difference-time part
and boundary phases; Im Gamma is always available in closed form (no n(omega)
in the odd-frequency part), so only Re Gamma ever needs quadrature.

For the Ohmic density h(omega) = s omega exp(-omega/omega_c):

    Im Gamma(t) = s arctan(omega_c t)
    Re Gamma(t) = (s/2) ln(1 + omega_c^2 t^2)          at T = 0,

and at finite temperature Re Gamma also has an image-sum form used here as
an independent cross-check of the quadrature route (`exponent_series_ohmic`).

Discrete baths replace the integral by a finite mode sum; these are exact,
no quadrature involved.

Infinite temperature (beta = 0) with a coupled bath is the instantaneous
dephasing limit: Re Gamma(t > 0) diverges, so Gamma is returned with an
infinite real part and Psi_1(t > 0) = 0.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .model import BathSpec, DiscreteBath, OhmicBath
from .numerics import QuadratureSettings, integrate_semi_infinite_batch

__all__ = [
    "TailTooLarge",
    "bose_occupation",
    "thermal_factor",
    "phase_exponent",
    "decoherence_exponent",
    "decoherence_exponent_grid",
    "psi1",
    "psi1_grid",
    "psi2",
    "exponent_series_ohmic",
]


class TailTooLarge(RuntimeError):
    """The image-sum truncation error bound exceeds the requested tolerance."""

    def __init__(self, message: str, bound: float):
        super().__init__(f"{message} (tail bound {bound:.3e})")
        self.bound = bound


def bose_occupation(omega, beta: float):
    """Mean occupation 1/(exp(beta omega) - 1); zero at beta = inf.

    Undefined at beta = 0 (callers must take the infinite-temperature limit
    at the level of Gamma, not of n).
    """
    if beta == 0:
        raise ValueError("bose occupation diverges at beta = 0")
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return np.zeros_like(omega)
    return 1.0 / np.expm1(beta * omega)


def thermal_factor(omega, beta: float):
    """coth(beta omega / 2) = 1 + 2 n(omega), computed without cancellation."""
    if beta == 0:
        raise ValueError("thermal factor diverges at beta = 0")
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return np.ones_like(omega)
    return 1.0 + 2.0 / np.expm1(beta * omega)


def phase_exponent(bath: BathSpec, t):
    """Im Gamma(t), in closed form for both bath kinds.

    Ohmic: s arctan(omega_c t).  Discrete: sum_k (g_k/omega_k)^2 sin(omega_k t).
    """
    t = np.asarray(t, dtype=float)
    if isinstance(bath, OhmicBath):
        return bath.s * np.arctan(bath.omega_c * t)
    g2w2 = (bath.couplings() / bath.frequencies()) ** 2
    return np.sin(np.multiply.outer(t, bath.frequencies())) @ g2w2


def _discrete_exponent(bath: DiscreteBath, beta: float, t: np.ndarray) -> np.ndarray:
    g2w2 = (bath.couplings() / bath.frequencies()) ** 2
    w = bath.frequencies()
    wt = np.multiply.outer(np.asarray(t, dtype=float), w)
    re = (2.0 * np.sin(0.5 * wt) ** 2) @ (g2w2 * thermal_factor(w, beta))
    im = np.sin(wt) @ g2w2
    return re + 1j * im


def _checked_times(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size and (not np.all(np.isfinite(t)) or np.min(t) < 0):
        raise ValueError("times must be finite and >= 0")
    return t


def _infinite_temperature_exponent(bath: BathSpec, t: np.ndarray) -> np.ndarray:
    # beta = 0 limit: instantaneous dephasing for any coupled bath
    out = np.where(t > 0, math.inf, 0.0) + 1j * phase_exponent(bath, t)
    return out.astype(complex)


def _ohmic_real_exponent_grid(
    bath: OhmicBath, beta: float, t: np.ndarray, settings: Optional[QuadratureSettings]
) -> np.ndarray:
    """Re Gamma on a batch of times via shared-panel quadrature."""

    def rows(omega: np.ndarray) -> np.ndarray:
        envelope = (
            bath.s * np.exp(-omega / bath.omega_c) * thermal_factor(omega, beta) / omega
        )
        osc = 2.0 * np.sin(0.5 * np.multiply.outer(t, omega)) ** 2
        return envelope * osc

    t_max = float(np.max(t))
    osc_period = (2.0 * math.pi / t_max) if t_max > 0 else None
    out = integrate_semi_infinite_batch(
        rows, t.size, decay_scale=bath.omega_c, osc_period=osc_period, settings=settings
    )
    return out.real


def decoherence_exponent_grid(
    bath: BathSpec,
    beta: float,
    t,
    settings: Optional[QuadratureSettings] = None,
) -> np.ndarray:
    """Gamma evaluated on an array of times (shared quadrature panels)."""
    t = _checked_times(t)
    if bath.is_trivial():
        return np.zeros(t.shape, dtype=complex)
    if beta == 0:
        return _infinite_temperature_exponent(bath, t)
    if isinstance(bath, DiscreteBath):
        return _discrete_exponent(bath, beta, t)
    re = _ohmic_real_exponent_grid(bath, beta, t, settings)
    re[t == 0] = 0.0
    return re + 1j * phase_exponent(bath, t)


def decoherence_exponent(
    bath: BathSpec,
    beta: float,
    t: float,
    settings: Optional[QuadratureSettings] = None,
) -> complex:
    """Gamma(t) for a single time."""
    return complex(decoherence_exponent_grid(bath, beta, [float(t)], settings)[0])


def psi1_grid(
    bath: BathSpec,
    beta: float,
    t,
    settings: Optional[QuadratureSettings] = None,
) -> np.ndarray:
    """Psi_1 = exp(-Gamma) on an array of times."""
    return np.exp(-decoherence_exponent_grid(bath, beta, t, settings))


def psi1(
    bath: BathSpec,
    beta: float,
    t: float,
    settings: Optional[QuadratureSettings] = None,
) -> complex:
    return complex(psi1_grid(bath, beta, [float(t)], settings)[0])


def psi2(
    bath: BathSpec,
    beta: float,
    t: float,
    t_prime: float,
    settings: Optional[QuadratureSettings] = None,
) -> complex:
    """Two-time envelope Psi_2(t, t'); requires t >= t' >= 0.

    Psi_2(t, t) = 1 and |Psi_2(t, t')| = |Psi_1(t - t')| hold by
    construction: the boundary factor is a pure phase.
    """
    if not (t >= t_prime >= 0):
        raise ValueError(f"need t >= t_prime >= 0, got t={t}, t_prime={t_prime}")
    boundary = phase_exponent(bath, t) - phase_exponent(bath, t_prime)
    return psi1(bath, beta, t - t_prime, settings) * complex(np.exp(2j * boundary))


def exponent_series_ohmic(
    s: float,
    omega_c: float,
    beta: float,
    t: float,
    k_max: Optional[int] = None,
    tail_tol: float = 1e-12,
) -> complex:
    """Gamma(t) for the Ohmic bath by the thermal image sum (no quadrature).

    Re Gamma(t) = (s/2) ln(1 + omega_c^2 t^2)
                + s sum_{k>=1} ln(1 + t^2 / (1/omega_c + k beta)^2)

    The sum is truncated at k_max terms and the remainder replaced by its
    midpoint-rule integral

        (s/beta) [ 2 t arctan(t/x0) - x0 ln(1 + t^2/x0^2) ],
        x0 = 1/omega_c + (k_max + 1/2) beta,

    which is appended to the returned value.  The midpoint correction error
    is bounded by (s beta / 24) |d/dx ln(1 + t^2/x^2)|_{x0}; when k_max is
    not given it is grown until that bound drops below tail_tol * max(1, Re),
    and TailTooLarge is raised if no affordable k_max achieves it.

    This route shares no code with the quadrature path, so agreement between
    the two is a meaningful check of both.
    """
    if beta == 0:
        raise ValueError("the image sum is undefined at beta = 0")
    if t < 0:
        raise ValueError(f"need t >= 0, got {t}")
    im = s * math.atan(omega_c * t)
    re0 = 0.5 * s * math.log1p((omega_c * t) ** 2)
    if math.isinf(beta) or s == 0.0 or t == 0.0:
        return complex(re0, im)

    def tail_and_bound(k: int) -> tuple[float, float]:
        x0 = 1.0 / omega_c + (k + 0.5) * beta
        tail = (s / beta) * (
            2.0 * t * math.atan(t / x0) - x0 * math.log1p((t / x0) ** 2)
        )
        bound = (s * beta / 24.0) * 2.0 * t * t / (x0 * (x0 * x0 + t * t))
        return tail, bound

    if k_max is None:
        k_max = 16
        while True:
            _, bound = tail_and_bound(k_max)
            if bound <= tail_tol * max(1.0, re0):
                break
            if k_max >= 1 << 24:
                raise TailTooLarge(
                    f"no k_max under {1 << 24} meets tail_tol={tail_tol}", bound=bound
                )
            k_max *= 2
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")

    re = re0
    block = 1 << 20
    for start in range(1, k_max + 1, block):
        k = np.arange(start, min(start + block, k_max + 1), dtype=float)
        x = 1.0 / omega_c + k * beta
        re += s * float(np.sum(np.log1p((t / x) ** 2)))
    tail, bound = tail_and_bound(k_max)
    if bound > tail_tol * max(1.0, abs(re)):
        raise TailTooLarge(
            f"tail bound exceeds tail_tol={tail_tol} at k_max={k_max}", bound=bound
        )
    return complex(re + tail, im)
