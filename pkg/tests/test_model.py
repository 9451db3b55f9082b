import math

import numpy as np
import pytest

from corrtrace.model import (
    ConfigError,
    DiscreteBath,
    ModelConfig,
    OhmicBath,
    beta_from_temperature,
    detuning,
    make_bath,
    renormalized_upper_energy,
    thermal_weights,
)


def test_ohmic_bath_validation():
    with pytest.raises(ConfigError):
        OhmicBath(s=-0.1, omega_c=0.2)
    with pytest.raises(ConfigError):
        OhmicBath(s=1.0, omega_c=0.0)
    with pytest.raises(ConfigError):
        OhmicBath(s=1.0, omega_c=-2.0)


def test_ohmic_spectral_density_and_shift():
    bath = OhmicBath(s=0.5, omega_c=0.2)
    w = np.array([0.0, 0.2, 1.0])
    expected = 0.5 * w * np.exp(-w / 0.2)
    assert np.allclose(bath.spectral_density(w), expected, rtol=0, atol=1e-15)
    assert bath.polaron_shift() == pytest.approx(0.5 * 0.2, abs=1e-15)
    assert not bath.is_trivial()
    assert OhmicBath(s=0.0, omega_c=0.2).is_trivial()


def test_discrete_bath_validation_and_arrays():
    with pytest.raises(ConfigError):
        DiscreteBath(modes=((0.3, 0.0),))
    with pytest.raises(ConfigError):
        DiscreteBath(modes=((0.3, -1.0),))
    bath = DiscreteBath(modes=((0.3, 0.8), (0.1, 1.5)))
    assert np.array_equal(bath.couplings(), [0.3, 0.1])
    assert np.array_equal(bath.frequencies(), [0.8, 1.5])
    assert bath.polaron_shift() == pytest.approx(0.09 / 0.8 + 0.01 / 1.5, rel=1e-14)
    assert DiscreteBath(modes=((0.0, 0.8),)).is_trivial()
    assert not bath.is_trivial()


def test_config_validation():
    bath = OhmicBath(s=1.0, omega_c=0.2)
    with pytest.raises(ConfigError):
        ModelConfig(e0=1.0, e1=1.0, beta=1.0, bath=bath)
    with pytest.raises(ConfigError):
        ModelConfig(e0=0.0, e1=1.0, beta=-0.5, bath=bath)
    with pytest.raises(ConfigError):
        ModelConfig(e0=0.0, e1=1.0, beta=math.nan, bath=bath)
    with pytest.raises(ConfigError):
        ModelConfig(e0=0.0, e1=1.0, beta=1.0, bath=bath, omega_p=0.0)
    with pytest.raises(ConfigError):
        ModelConfig(e0=0.0, e1=1.0, beta=1.0, bath=bath, t_max=0.0)
    with pytest.raises(ConfigError):
        ModelConfig(e0=0.0, e1=1.0, beta=1.0, bath=bath, n_steps=1)


def test_config_accepts_temperature_limits():
    bath = OhmicBath(s=1.0, omega_c=0.2)
    ModelConfig(e0=0.0, e1=1.0, beta=0.0, bath=bath)
    ModelConfig(e0=0.0, e1=1.0, beta=math.inf, bath=bath)


def test_time_grid_and_gap():
    cfg = ModelConfig(
        e0=-0.25, e1=0.75, beta=1.0, bath=OhmicBath(s=0.1, omega_c=0.2), t_max=10.0, n_steps=11
    )
    assert cfg.omega0 == pytest.approx(1.0)
    t = cfg.time_grid()
    assert t[0] == 0.0 and t[-1] == 10.0 and t.size == 11
    assert np.allclose(np.diff(t), 1.0)


def test_beta_from_temperature():
    assert beta_from_temperature(0.0) == math.inf
    assert beta_from_temperature(2.0) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        beta_from_temperature(-1.0)


def test_detuning_includes_polaron_shift():
    cfg = ModelConfig(
        e0=0.0, e1=1.0, beta=1.0, bath=OhmicBath(s=1.0, omega_c=0.2), omega_p=1.0
    )
    assert renormalized_upper_energy(cfg) == pytest.approx(0.8)
    assert detuning(cfg) == pytest.approx(-0.2)
    free = ModelConfig(
        e0=0.0, e1=1.0, beta=1.0, bath=OhmicBath(s=0.0, omega_c=0.2), omega_p=0.7
    )
    assert detuning(free) == pytest.approx(0.3)


def test_thermal_weights_normalized_and_limits():
    bath = OhmicBath(s=1.0, omega_c=0.2)
    cfg = ModelConfig(e0=0.0, e1=1.0, beta=2.0, bath=bath)
    w = thermal_weights(cfg)
    assert w.p0 + w.p1 == pytest.approx(1.0, abs=1e-15)
    gap = 0.8
    assert w.p1 / w.p0 == pytest.approx(math.exp(-2.0 * gap), rel=1e-13)
    assert w.z_s_prime == pytest.approx(1.0 + math.exp(-2.0 * gap), rel=1e-13)

    cold = thermal_weights(ModelConfig(e0=0.0, e1=1.0, beta=math.inf, bath=bath))
    assert cold.p0 == 1.0 and cold.p1 == 0.0

    hot = thermal_weights(ModelConfig(e0=0.0, e1=1.0, beta=0.0, bath=bath))
    assert hot.p0 == pytest.approx(0.5) and hot.p1 == pytest.approx(0.5)


def test_thermal_weights_reject_collapsed_gap():
    # shift 6 * 0.2 = 1.2 pushes the renormalized upper level below the ground state
    cfg = ModelConfig(e0=0.0, e1=1.0, beta=1.0, bath=OhmicBath(s=6.0, omega_c=0.2))
    with pytest.raises(ConfigError):
        thermal_weights(cfg)


def test_make_bath():
    bath = make_bath("ohmic", s=0.3, omega_c=0.5)
    assert isinstance(bath, OhmicBath) and bath.s == 0.3
    bath = make_bath("discrete", modes=[[0.3, 0.8]])
    assert isinstance(bath, DiscreteBath) and bath.modes == ((0.3, 0.8),)
    with pytest.raises(ConfigError):
        make_bath("lorentzian", s=1.0, omega_c=0.2)
    with pytest.raises(ConfigError):
        make_bath("ohmic", s=1.0)
    with pytest.raises(ConfigError):
        make_bath("discrete")
