import math

import numpy as np
import pytest
from scipy import integrate

from gmgd_sim import study_preset_spec


def quad_ell(u, p):
    """Independent oracle: int_u^inf r^-1 exp(-r^p) dr by adaptive quadrature in log-radius."""
    def f(y):
        z = p * y
        return 0.0 if z > 7.0 else math.exp(-math.exp(z))

    lo = math.log(u)
    if lo >= 0:
        val, _ = integrate.quad(f, lo, np.inf, epsabs=0, epsrel=1e-13, limit=200)
        return val
    a, _ = integrate.quad(f, lo, 0.0, epsabs=0, epsrel=1e-13, limit=200)
    b, _ = integrate.quad(f, 0.0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return a + b


@pytest.fixture(scope="session")
def study_spec():
    return study_preset_spec(30)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
