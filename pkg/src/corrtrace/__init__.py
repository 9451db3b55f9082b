"""Transient response of a dephasing qubit and the trace-distance witness
of initial system-bath correlations.

A two-level system in a bosonic dephasing bath is probed by a weak field
switched on at t = 0.  The package computes the first-order dipole
response for a correlated (global Gibbs) initial state and for the
factorized product of its marginals, and the trace distance between the
two reduced evolutions, which is nonzero only because the Gibbs state
carries system-bath correlations.

Modules: `model` (configuration), `numerics` (quadrature, cumulative
integrals), `correlations` (decoherence exponent and envelopes),
`dynamics` (response integrals), `distance` (witness), `oracle`
(truncated-Fock reference), `cli` (command line).
"""

from .model import (
    BathSpec,
    ConfigError,
    DiscreteBath,
    ModelConfig,
    OhmicBath,
    ThermalWeights,
    beta_from_temperature,
    detuning,
    renormalized_upper_energy,
    thermal_weights,
)
from .numerics import ComplexSeries, QuadratureSettings
from .dynamics import DipoleSignal, QubitMatrix, a_corr, a_marg, response_pair
from .distance import DistanceSeries, distance_series, trace_distance_qubit

__version__ = "0.1.0"

__all__ = [
    "BathSpec",
    "ConfigError",
    "DiscreteBath",
    "ModelConfig",
    "OhmicBath",
    "ThermalWeights",
    "beta_from_temperature",
    "detuning",
    "renormalized_upper_energy",
    "thermal_weights",
    "ComplexSeries",
    "QuadratureSettings",
    "DipoleSignal",
    "QubitMatrix",
    "a_corr",
    "a_marg",
    "response_pair",
    "DistanceSeries",
    "distance_series",
    "trace_distance_qubit",
    "__version__",
]
