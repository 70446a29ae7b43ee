import numpy as np
import pytest

from charfront.config import GasConstants, Tolerances
from charfront.functionals import calibrate_weights
from charfront.gas import FlowState, reference_state


@pytest.fixture(scope="session")
def gas():
    return GasConstants()


@pytest.fixture(scope="session")
def tol():
    return Tolerances()


@pytest.fixture(scope="session")
def ref(gas):
    return reference_state(gas)


@pytest.fixture(scope="session")
def weights(gas, ref, tol):
    # calibration is deterministic and moderately expensive; share it
    return calibrate_weights(gas, ref, tol, seed=0)


def random_states(gas, ref, n, seed=0, radius=0.1):
    """Seeded admissible states in a relative box around the reference."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        du, dv, dp, db = rng.uniform(-radius, radius, size=4)
        try:
            out.append(FlowState(ref.u * (1 + du), ref.u * dv,
                                 ref.p * (1 + dp), ref.b * (1 + db), gas))
        except Exception:
            continue
    return out


@pytest.fixture(scope="session")
def state_cloud(gas, ref):
    return random_states(gas, ref, 100, seed=123)
