import numpy as np
import pytest

from collfric import quantum as qc
from collfric.constants import EV, HBAR, MEV, NM


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


def random_qubit(rng, omega_ev_range=(0.1, 1.5)):
    return qc.QubitThermalState(float(rng.uniform(-1, 1)),
                                float(rng.uniform(*omega_ev_range)) * EV / HBAR)


def random_swap_params(rng, gamma_A=0.0):
    from collfric.models import DampedSwapParams
    return DampedSwapParams(random_qubit(rng), random_qubit(rng),
                            float(rng.uniform(0.1, 0.5)) * NM, gamma_A,
                            J=float(rng.uniform(10, 100)) * MEV / HBAR)
