"""Scenario names understood by the CLI and experiment configs."""

from __future__ import annotations

from functools import partial
from typing import Any, Callable

from ..errors import ConfigError, PreconditionError
from ..ssp.model import SspInstance
from .builders import (
    make_chain,
    make_dead_end_toy,
    make_gridworld,
    make_offset_example,
    make_sspcom_toy,
    make_two_state_toy,
)

SCENARIOS: dict[str, Callable[..., SspInstance]] = {
    "gridworld-uniform": partial(make_gridworld, scenario="uniform"),
    "gridworld-sandpit": partial(make_gridworld, scenario="sandpit"),
    "gridworld-zero": partial(make_gridworld, scenario="zero_region"),
    "toy-fig1": make_two_state_toy,
    "toy-fig1-deadend": make_dead_end_toy,
    "toy-offset": make_offset_example,
    "toy-sspcom": make_sspcom_toy,
    "chain": make_chain,
}


def scenario_names() -> list[str]:
    return sorted(SCENARIOS)


def build_scenario(name: str, params: dict[str, Any] | None = None) -> SspInstance:
    builder = SCENARIOS.get(name)
    if builder is None:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(scenario_names())}")
    try:
        return builder(**(params or {}))
    except TypeError as e:
        raise ConfigError(f"bad parameters for scenario {name!r}: {e}") from e
    except PreconditionError as e:
        raise ConfigError(f"invalid scenario {name!r}: {e}") from e
