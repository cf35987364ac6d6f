"""
Doubling-epoch learners.

An epoch ends, checked before acting, as soon as the pending visit count of
the chosen pair reaches max(1, N(s,a)), or, when the plan carries a step
horizon, once the epoch has run that many steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..constants import DEFAULT_DELTA, EVI_MAX_SWEEPS, H_MAX, UCRL2_MAX_SWEEPS, VI_TOL
from ..environments.env import Environment
from ..errors import PreconditionError
from ..planner.confidence import ConfidenceModel
from ..ssp.model import StationaryPolicy
from ..types import EpisodeLog, EpochLog

log = logging.getLogger("ssplab.baselines")

PLANNING_MODES = ("evi", "two_step")


@dataclass
class BaselineConfig:
    delta: float = DEFAULT_DELTA
    seed: int = 0
    confidence_mode: str = "hoeffding_experimental"
    use_pivot_horizon: bool = False
    cost_floor: float | None = None
    planning: str = "evi"
    replan_at_goal: bool = False
    h_max: int = H_MAX
    evi_max_sweeps: int = EVI_MAX_SWEEPS
    ucrl2_max_sweeps: int = UCRL2_MAX_SWEEPS
    oracle_tol: float = VI_TOL

    def validate(self) -> None:
        if not 0 < self.delta < 1:
            raise PreconditionError(f"delta must lie in (0, 1), got {self.delta}")
        if self.planning not in PLANNING_MODES:
            raise PreconditionError(f"unknown planning mode {self.planning!r}; expected one of {PLANNING_MODES}")
        if self.cost_floor is not None and self.cost_floor <= 0:
            raise PreconditionError(f"cost floor must be positive, got {self.cost_floor}")


@dataclass
class EpochPlan:
    policy: StationaryPolicy
    sweeps: int
    residual: float
    tolerance: float
    horizon: int | None = None
    converged: bool = True


class DoublingEpochLearner:
    """Shared acting loop; subclasses provide ``plan``."""

    def __init__(self, env: Environment, model: ConfidenceModel, *, run_id: str, replan_at_goal: bool = False):
        self.env = env
        self.model = model
        self.run_id = run_id
        self.replan_at_goal = replan_at_goal
        self.t = 1
        self.epochs: list[EpochLog] = []
        self._plan: EpochPlan | None = None

    def plan(self, k: int) -> EpochPlan:
        raise NotImplementedError

    def on_goal(self) -> None:
        """Hook run when an episode reaches the goal."""

    def _start_epoch(self, k: int) -> None:
        self.model.absorb()
        self._plan = self.plan(k)
        entry = EpochLog(
            index=len(self.epochs),
            start_step=self.t,
            episode=k,
            sweeps=self._plan.sweeps,
            residual=self._plan.residual,
            tolerance=self._plan.tolerance,
            horizon=self._plan.horizon,
            converged=self._plan.converged,
            policy=self._plan.policy.as_list(),
        )
        self.epochs.append(entry)
        log.debug(
            f"[{self.run_id}] epoch {entry.index} at t={self.t} (episode {k}): "
            f"{entry.sweeps} sweeps, horizon={entry.horizon}"
        )

    def _epoch_over(self, s: int, a: int) -> bool:
        if self.model.pending_sas[s, a].sum() >= max(1, int(self.model.counts_sas[s, a].sum())):
            return True
        horizon = self._plan.horizon
        return horizon is not None and self.epochs[-1].steps >= horizon

    def run_episode(self, k: int) -> EpisodeLog:
        self.env.reset()
        if self._plan is None or self.replan_at_goal:
            self._start_epoch(k)
        episode = EpisodeLog(k=k)
        while not self.env.at_goal:
            s = self.env.state
            a = self._plan.policy(s)
            if self._epoch_over(s, a):
                self._start_epoch(k)
                a = self._plan.policy(s)
            s_next, cost = self.env.step(a)
            self.model.observe(s, a, s_next)
            self.t += 1
            self.epochs[-1].steps += 1
            episode.length += 1
            episode.cost += cost
        self.on_goal()
        episode.phase1_steps = episode.length
        episode.phase1_cost = episode.cost
        return episode
