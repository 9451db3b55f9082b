"""Model definition: a two-level system dephasing in a bosonic bath.

Units: hbar = k_B = 1 throughout.  Energies are measured in units of the
qubit gap omega0 = E1 - E0 (the presets set E0 = 0, E1 = 1) and times in
1/omega0.  Temperature enters only through beta = 1/(k_B T); beta = inf is
the zero-temperature limit and beta = 0 the infinite-temperature one.

The bath couples diagonally (pure dephasing): only the upper level shifts,
by the polaron energy sum(g_k^2 / omega_k), which for the Ohmic continuum
h(omega) = s * omega * exp(-omega / omega_c) evaluates to s * omega_c.
Thermal weights of the dressed system Hamiltonian use the renormalized
upper energy E1' = E1 - shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


class ConfigError(ValueError):
    """Raised when a model configuration is inconsistent or out of range."""


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic continuum with exponential cutoff: h(omega) = s * omega * exp(-omega/omega_c)."""

    s: float
    omega_c: float

    def __post_init__(self) -> None:
        if self.s < 0:
            raise ConfigError(f"coupling strength must be >= 0, got s={self.s}")
        if not self.omega_c > 0:
            raise ConfigError(f"cutoff must be positive, got omega_c={self.omega_c}")

    def spectral_density(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.s * omega * np.exp(-omega / self.omega_c)

    def polaron_shift(self) -> float:
        # integral of h(omega)/omega over [0, inf)
        return self.s * self.omega_c

    def is_trivial(self) -> bool:
        return self.s == 0.0


@dataclass(frozen=True)
class DiscreteBath:
    """Finite set of modes, each a (coupling g_k, frequency omega_k) pair."""

    modes: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        modes = tuple((float(g), float(w)) for g, w in self.modes)
        for g, w in modes:
            if not w > 0:
                raise ConfigError(f"mode frequencies must be positive, got omega={w}")
        object.__setattr__(self, "modes", modes)

    def couplings(self) -> np.ndarray:
        return np.array([g for g, _ in self.modes], dtype=float)

    def frequencies(self) -> np.ndarray:
        return np.array([w for _, w in self.modes], dtype=float)

    def polaron_shift(self) -> float:
        # sum of g_k^2 / omega_k
        return float(sum(g * g / w for g, w in self.modes))

    def is_trivial(self) -> bool:
        return all(g == 0.0 for g, _ in self.modes)


BathSpec = Union[OhmicBath, DiscreteBath]


@dataclass(frozen=True)
class ModelConfig:
    """Full scenario: qubit energies, bath, temperature, probe field, time grid.

    beta may be any value >= 0, including math.inf (T = 0).  beta = 0 is the
    infinite-temperature limit: thermal weights become 1/2 each, and for a
    coupled Ohmic bath the dephasing is instantaneous (the decoherence
    exponent diverges for t > 0).
    """

    e0: float
    e1: float
    beta: float
    bath: BathSpec
    omega_p: float = 1.0
    field_prefactor: float = 0.1
    t_max: float = 100.0
    n_steps: int = 2001

    def __post_init__(self) -> None:
        if not self.e1 > self.e0:
            raise ConfigError(f"need e1 > e0, got e0={self.e0}, e1={self.e1}")
        if math.isnan(self.beta) or self.beta < 0:
            raise ConfigError(f"beta must be >= 0 (inf allowed), got {self.beta}")
        if not self.omega_p > 0:
            raise ConfigError(f"probe frequency must be positive, got {self.omega_p}")
        if not self.t_max > 0:
            raise ConfigError(f"t_max must be positive, got {self.t_max}")
        if self.n_steps < 2:
            raise ConfigError(f"need at least 2 grid points, got {self.n_steps}")

    @property
    def omega0(self) -> float:
        return self.e1 - self.e0

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)


@dataclass(frozen=True)
class ThermalWeights:
    """Gibbs populations of the dressed qubit: p0 + p1 = 1, p_i >= 0."""

    p0: float
    p1: float
    z_s_prime: float


def beta_from_temperature(k_t: float) -> float:
    """Inverse temperature for a given k_B * T; k_t = 0 means T = 0 (beta = inf)."""
    if k_t < 0:
        raise ConfigError(f"k_B T must be >= 0, got {k_t}")
    if k_t == 0:
        return math.inf
    return 1.0 / k_t


def renormalized_upper_energy(config: ModelConfig) -> float:
    """Upper level shifted down by the bath reorganization energy: E1' = E1 - shift."""
    return config.e1 - config.bath.polaron_shift()


def detuning(config: ModelConfig) -> float:
    """Probe detuning from the dressed gap: delta_omega = (E1' - E0) - omega_p."""
    return (renormalized_upper_energy(config) - config.e0) - config.omega_p


def thermal_weights(config: ModelConfig) -> ThermalWeights:
    """Dressed-qubit Gibbs weights p_i = exp(-beta E_i') / Z_S' with E0' = E0.

    Computed with the ground state factored out so beta = inf is exact
    (p0 = 1) and large beta never overflows.  Requires E1' > E0: a shift
    that pushes the renormalized upper level below the ground state means
    the two-level truncation no longer orders the levels.
    """
    e1p = renormalized_upper_energy(config)
    gap = e1p - config.e0
    if not gap > 0:
        raise ConfigError(
            f"renormalized gap must stay positive, got E1' - E0 = {gap}"
        )
    if math.isinf(config.beta):
        w1 = 0.0
    else:
        w1 = math.exp(-config.beta * gap)
    z = 1.0 + w1
    # z_s_prime carries the factored-out exp(-beta * e0) ground-state weight
    if math.isinf(config.beta):
        z_full = math.inf if config.e0 < 0 else (0.0 if config.e0 > 0 else 1.0)
    else:
        z_full = math.exp(-config.beta * config.e0) * z
    return ThermalWeights(p0=1.0 / z, p1=w1 / z, z_s_prime=z_full)


def make_bath(
    kind: str,
    *,
    s: float | None = None,
    omega_c: float | None = None,
    modes: Sequence[Sequence[float]] | None = None,
) -> BathSpec:
    """Construct a bath spec from plain config values (used by the CLI loader)."""
    if kind == "ohmic":
        if s is None or omega_c is None:
            raise ConfigError("ohmic bath needs both 's' and 'omega_c'")
        if modes is not None:
            raise ConfigError("'modes' is only valid for a discrete bath")
        return OhmicBath(s=float(s), omega_c=float(omega_c))
    if kind == "discrete":
        if modes is None:
            raise ConfigError("discrete bath needs 'modes' = [[g, omega], ...]")
        if s is not None or omega_c is not None:
            raise ConfigError("'s'/'omega_c' are only valid for an ohmic bath")
        try:
            pairs = tuple((float(g), float(w)) for g, w in modes)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed mode list: {modes!r}") from exc
        return DiscreteBath(modes=pairs)
    raise ConfigError(f"unknown bath kind {kind!r} (expected 'ohmic' or 'discrete')")
