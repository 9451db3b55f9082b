import math

import pytest

from corrtrace.model import DiscreteBath, ModelConfig, OhmicBath


@pytest.fixture
def ohmic_config():
    def make(s=1.0, omega_c=0.2, beta=1.0, omega_p=1.0, t_max=50.0, n_steps=501, **kw):
        return ModelConfig(
            e0=0.0,
            e1=1.0,
            beta=beta,
            bath=OhmicBath(s=s, omega_c=omega_c),
            omega_p=omega_p,
            t_max=t_max,
            n_steps=n_steps,
            **kw,
        )

    return make


@pytest.fixture
def discrete_config():
    def make(modes=((0.3, 0.8),), beta=1.0, omega_p=1.0, t_max=10.0, n_steps=201, **kw):
        return ModelConfig(
            e0=0.0,
            e1=1.0,
            beta=beta,
            bath=DiscreteBath(modes=modes),
            omega_p=omega_p,
            t_max=t_max,
            n_steps=n_steps,
            **kw,
        )

    return make


@pytest.fixture
def zero_temperature():
    return math.inf
