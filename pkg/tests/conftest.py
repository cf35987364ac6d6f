import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.environments import make_chain, make_gridworld, make_two_state_toy  # noqa: E402
from core.planner import ConfidenceSnapshot  # noqa: E402


@pytest.fixture
def toy():
    return make_two_state_toy(1.0, 3.0)


@pytest.fixture
def chain3():
    return make_chain(3)


@pytest.fixture
def uniform_grid():
    return make_gridworld()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def _exact_snapshot(inst):
    return ConfidenceSnapshot(
        p_hat=inst.kernel,
        radii=np.zeros((inst.n_states, inst.n_actions)),
        mode="hoeffding_experimental",
        counts=np.zeros(inst.kernel.shape, dtype=np.int64),
    )


@pytest.fixture
def exact_snapshot():
    """Builds a confidence snapshot whose only plausible kernel is the true one."""
    return _exact_snapshot

