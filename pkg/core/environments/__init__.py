"""Concrete SSP instances and the sample-only environment interface."""

from .builders import (
    GRID_ACTION_NAMES,
    GRID_ACTIONS,
    make_chain,
    make_dead_end_toy,
    make_gridworld,
    make_offset_example,
    make_random_instance,
    make_sspcom_toy,
    make_two_state_toy,
)
from .env import Environment, StochasticCostEnvironment, env_step, make_environment, rng_streams
from .registry import SCENARIOS, build_scenario, scenario_names

__all__ = [
    "build_scenario",
    "env_step",
    "Environment",
    "GRID_ACTION_NAMES",
    "GRID_ACTIONS",
    "make_chain",
    "make_dead_end_toy",
    "make_environment",
    "make_gridworld",
    "make_offset_example",
    "make_random_instance",
    "make_sspcom_toy",
    "make_two_state_toy",
    "rng_streams",
    "SCENARIOS",
    "scenario_names",
    "StochasticCostEnvironment",
]
