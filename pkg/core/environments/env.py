"""Sample-only environment wrappers handed to learners."""

from __future__ import annotations

import numpy as np

from ..errors import EnvironmentStepError
from ..ssp.model import SspInstance


def rng_streams(seed: int, n: int) -> list[np.random.Generator]:
    """Independent, reproducible generators spawned from one seed."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]


class Environment:
    """
    Hides the kernel of an SSP instance behind reset/step.

    Learners see the dimensions, start state, declared cost range and, when
    ``costs_known`` is true, the cost table.
    """

    costs_known = True

    def __init__(self, inst: SspInstance, rng: np.random.Generator):
        self._inst = inst
        self._rng = rng
        cdf = np.cumsum(inst.kernel, axis=2)
        cdf[:, :, -1] = 1.0
        self._cdf = cdf
        self.state: int | None = None
        self.steps = 0

    @property
    def n_states(self) -> int:
        return self._inst.n_states

    @property
    def n_actions(self) -> int:
        return self._inst.n_actions

    @property
    def goal(self) -> int:
        return self._inst.goal

    @property
    def start(self) -> int:
        return self._inst.start

    @property
    def c_min(self) -> float:
        return self._inst.c_min

    @property
    def c_max(self) -> float:
        return self._inst.c_max

    @property
    def costs(self) -> np.ndarray:
        return self._inst.costs

    @property
    def at_goal(self) -> bool:
        return self.state == self.goal

    def reset(self) -> int:
        self.state = self._inst.start
        return self.state

    def _cost(self, state: int, action: int) -> float:
        return float(self._inst.costs[state, action])

    def step(self, action: int) -> tuple[int, float]:
        if self.state is None:
            raise EnvironmentStepError("step before reset")
        if self.state == self.goal:
            raise EnvironmentStepError("step from the goal state")
        if not 0 <= action < self.n_actions:
            raise EnvironmentStepError(f"invalid action {action} (have {self.n_actions})")
        s = self.state
        cost = self._cost(s, action)
        u = self._rng.random()
        nxt = int(np.searchsorted(self._cdf[s, action], u, side="right"))
        self.state = min(nxt, self.goal)
        self.steps += 1
        return self.state, cost

    def true_instance(self) -> SspInstance:
        """Oracle access for regret accounting and post-hoc checks; learners never call this."""
        return self._inst


class StochasticCostEnvironment(Environment):
    """Costs drawn from {c_min, c_max} with mean c(s,a); the cost table is hidden."""

    costs_known = False

    def __init__(self, inst: SspInstance, rng: np.random.Generator, cost_rng: np.random.Generator):
        super().__init__(inst, rng)
        self._cost_rng = cost_rng
        span = inst.c_max - inst.c_min
        if span > 0:
            self._p_high = np.clip((inst.costs - inst.c_min) / span, 0.0, 1.0)
        else:
            self._p_high = np.zeros_like(inst.costs)

    @property
    def costs(self) -> np.ndarray:
        raise EnvironmentStepError("costs are unknown in a stochastic-cost environment")

    def _cost(self, state: int, action: int) -> float:
        high = self._cost_rng.random() < self._p_high[state, action]
        return self._inst.c_max if high else self._inst.c_min


def make_environment(inst: SspInstance, seed: int, stochastic_costs: bool = False) -> Environment:
    """Stream 0 drives transitions, stream 1 drives cost draws."""
    transitions, cost_draws = rng_streams(seed, 2)
    if stochastic_costs:
        return StochasticCostEnvironment(inst, transitions, cost_draws)
    return Environment(inst, transitions)


def env_step(env: Environment, action: int) -> tuple[int, float]:
    return env.step(action)
