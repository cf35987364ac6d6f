import math

import numpy as np
import pytest

from core.environments import (
    GRID_ACTION_NAMES,
    StochasticCostEnvironment,
    build_scenario,
    env_step,
    make_environment,
    make_gridworld,
    make_random_instance,
    rng_streams,
    scenario_names,
)
from core.errors import ConfigError, EnvironmentStepError, PreconditionError
from core.ssp import validate_instance

RIGHT = GRID_ACTION_NAMES.index("right")
LEFT = GRID_ACTION_NAMES.index("left")


def _cell_index(inst, cell):
    return [tuple(c) for c in inst.meta["cells"]].index(cell)


# ── gridworld ──


def test_gridworld_dimensions(uniform_grid):
    assert uniform_grid.kernel.shape == (11, 4, 12)
    assert uniform_grid.start == _cell_index(uniform_grid, (0, 0))
    assert validate_instance(uniform_grid).ok


def test_gridworld_slip_probabilities(uniform_grid):
    s = _cell_index(uniform_grid, (0, 0))
    row = uniform_grid.kernel[s, RIGHT]
    assert row[_cell_index(uniform_grid, (0, 1))] == pytest.approx(0.95)
    assert row[_cell_index(uniform_grid, (1, 0))] == pytest.approx(0.05 / 3)
    assert row[s] == pytest.approx(2 * 0.05 / 3)
    assert row.sum() == pytest.approx(1.0)


def test_gridworld_wall_keeps_agent_in_place(uniform_grid):
    s = _cell_index(uniform_grid, (0, 0))
    assert uniform_grid.kernel[s, LEFT, s] == 1.0


def test_gridworld_goal_neighbour_moves_into_goal(uniform_grid):
    s = _cell_index(uniform_grid, (1, 3))
    down = GRID_ACTION_NAMES.index("down")
    assert uniform_grid.kernel[s, down, uniform_grid.goal] == pytest.approx(0.95)


def test_sandpit_and_zero_region_costs():
    sandpit = make_gridworld(scenario="sandpit", beta=0.1)
    assert sandpit.costs[_cell_index(sandpit, (1, 1))].tolist() == [1.0] * 4
    assert sandpit.costs[_cell_index(sandpit, (0, 0))].tolist() == [0.1] * 4
    assert (sandpit.c_min, sandpit.c_max) == (0.1, 1.0)

    zero = make_gridworld(scenario="zero_region")
    assert zero.c_min == 0.0
    assert zero.costs[_cell_index(zero, (1, 0))].tolist() == [0.0] * 4
    assert zero.costs[_cell_index(zero, (2, 2))].tolist() == [0.4] * 4


def test_gridworld_rejects_bad_parameters():
    with pytest.raises(PreconditionError):
        make_gridworld(scenario="lava")
    with pytest.raises(PreconditionError):
        make_gridworld(p_f=1.0)
    with pytest.raises(PreconditionError):
        make_gridworld(start=(2, 3))
    with pytest.raises(PreconditionError):
        make_gridworld(scenario="sandpit", beta=0.0)


# ── environment ──


def test_step_errors(toy):
    env = make_environment(toy, 0)
    with pytest.raises(EnvironmentStepError):
        env.step(0)
    env.reset()
    with pytest.raises(EnvironmentStepError):
        env.step(2)
    env_step(env, 1)
    assert env.at_goal
    with pytest.raises(EnvironmentStepError):
        env.step(0)


def test_step_returns_known_cost(toy):
    env = make_environment(toy, 0)
    env.reset()
    assert env_step(env, 0) == (0, 1.0)
    assert env_step(env, 1) == (toy.goal, 3.0)
    assert env.steps == 2


def test_transition_frequencies(uniform_grid):
    env = make_environment(uniform_grid, 9)
    n = 20_000
    hits = 0
    for _ in range(n):
        env.reset()
        s_next, _ = env.step(RIGHT)
        hits += s_next == _cell_index(uniform_grid, (0, 1))
    sigma = math.sqrt(0.95 * 0.05 / n)
    assert abs(hits / n - 0.95) <= 4 * sigma


def test_same_seed_same_trajectory(uniform_grid):
    def trajectory(seed):
        env = make_environment(uniform_grid, seed)
        env.reset()
        states = []
        for _ in range(50):
            if env.at_goal:
                env.reset()
            states.append(env.step(RIGHT)[0])
        return states

    assert trajectory(5) == trajectory(5)
    assert trajectory(5) != trajectory(6)


def test_rng_streams_are_reproducible():
    a = [g.random() for g in rng_streams(3, 2)]
    b = [g.random() for g in rng_streams(3, 2)]
    assert a == b
    assert a[0] != a[1]


def test_stochastic_cost_mean(rng):
    inst = make_random_instance(3, 2, rng, cost_range=(0.2, 1.0))
    env = make_environment(inst, 1, stochastic_costs=True)
    assert isinstance(env, StochasticCostEnvironment)
    assert not env.costs_known
    with pytest.raises(EnvironmentStepError):
        _ = env.costs

    n = 20_000
    draws = np.empty(n)
    for i in range(n):
        env.reset()
        draws[i] = env.step(0)[1]
    assert set(np.unique(draws)) <= {0.2, 1.0}
    mean = inst.costs[inst.start, 0]
    p = (mean - 0.2) / 0.8
    sigma = 0.8 * math.sqrt(p * (1 - p) / n)
    assert abs(draws.mean() - mean) <= 4 * sigma + 1e-12


# ── registry ──


def test_scenario_registry():
    assert "gridworld-uniform" in scenario_names()
    assert build_scenario("chain", {"n": 4}).n_states == 4
    assert build_scenario("gridworld-sandpit", {"beta": 0.01}).c_min == 0.01


def test_scenario_registry_errors():
    with pytest.raises(ConfigError, match="unknown scenario"):
        build_scenario("maze")
    with pytest.raises(ConfigError):
        build_scenario("chain", {"length": 3})
    with pytest.raises(ConfigError):
        build_scenario("chain", {"n": 0})
