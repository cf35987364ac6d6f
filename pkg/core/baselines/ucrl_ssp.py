"""Doubling-epoch learner that plans with SSP value iteration instead of average reward."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..environments.env import make_environment
from ..errors import PreconditionError
from ..planner.confidence import ConfidenceModel, ConfidenceSnapshot, bernstein_radii
from ..planner.evi import evi_ssp, pivot_horizon
from ..ssp.chains import chain_of
from ..ssp.model import SspInstance
from ..ssp.planning import exact_value_iteration, optimal_value
from ..types import RunRecord
from ..agent.diagnostics import compute_diagnostics
from .epochs import BaselineConfig, DoublingEpochLearner, EpochPlan

log = logging.getLogger("ssplab.baselines")


def floor_costs(costs: np.ndarray, floor: float) -> np.ndarray:
    """Replace zero costs with ``floor``; positive costs are kept."""
    costs = np.asarray(costs, dtype=float)
    return np.where(costs > 0, costs, floor)


def two_step_kernel(snapshot: ConfidenceSnapshot, delta: float) -> np.ndarray:
    """Lower plausible bound on every non-goal next state; the remaining mass goes to the goal."""
    radii = bernstein_radii(snapshot.counts, delta) if snapshot.mode != "bernstein" else snapshot.radii
    kernel = np.maximum(0.0, snapshot.p_hat - radii)
    kernel[:, :, -1] = 0.0
    kernel[:, :, -1] = 1.0 - kernel.sum(axis=2)
    return kernel


class UcrlSspLearner(DoublingEpochLearner):
    def __init__(self, env, model, cfg: BaselineConfig, costs: np.ndarray, *, run_id: str):
        super().__init__(env, model, run_id=run_id, replan_at_goal=cfg.replan_at_goal)
        self.cfg = cfg
        self.costs = costs

    def plan(self, k: int) -> EpochPlan:
        cfg = self.cfg
        gamma = 1.0 / math.sqrt(k) if cfg.use_pivot_horizon else None
        epsilon = float(self.costs.min()) / (2.0 * self.t)
        snapshot = self.model.snapshot()
        if cfg.planning == "two_step":
            optimistic = SspInstance(
                kernel=two_step_kernel(snapshot, cfg.delta),
                costs=self.costs,
                start=self.env.start,
                c_min=float(self.costs.min()),
                c_max=float(self.costs.max()),
            )
            sol = exact_value_iteration(optimistic, tol=epsilon, max_iter=cfg.evi_max_sweeps)
            horizon = None
            if gamma is not None:
                horizon = pivot_horizon(chain_of(optimistic, sol.policy), gamma, cfg.h_max).H
            return EpochPlan(sol.policy, sol.iterations, sol.residual, epsilon, horizon)
        plan = evi_ssp(
            snapshot,
            self.costs,
            epsilon,
            gamma=gamma,
            h_max=cfg.h_max,
            max_sweeps=cfg.evi_max_sweeps,
        )
        horizon = plan.pivot_horizon if gamma is not None else None
        return EpochPlan(plan.policy, plan.iterations, plan.residual, epsilon, horizon)


def run_ucrl_ssp_style(
    inst: SspInstance,
    cfg: BaselineConfig,
    K: int,
    *,
    v_star: float | None = None,
) -> RunRecord:
    """
    Doubling epochs with optimistic SSP planning. Zero costs are floored at
    S²A/K unless ``cfg.cost_floor`` says otherwise; with ``use_pivot_horizon``
    an epoch also ends after the pivot horizon of its plan (γ = 1/√k).
    """
    cfg.validate()
    if K < 1:
        raise PreconditionError(f"need at least one episode, got K={K}")
    floor = cfg.cost_floor if cfg.cost_floor is not None else inst.n_states**2 * inst.n_actions / K
    costs = floor_costs(inst.costs, floor)
    if v_star is None:
        v_star = optimal_value(inst, tol=cfg.oracle_tol).value_at(inst.start)
    algorithm = "ucrl_ssp_pivot" if cfg.use_pivot_horizon else "ucrl_ssp"
    env = make_environment(inst, cfg.seed)
    model = ConfidenceModel(inst.n_states, inst.n_actions, cfg.confidence_mode, cfg.delta)
    run_id = f"{algorithm}:{cfg.seed}"
    learner = UcrlSspLearner(env, model, cfg, costs, run_id=run_id)
    record = RunRecord(algorithm=algorithm, seed=cfg.seed, K=K, v_star=v_star, c_max=inst.c_max)
    for k in range(1, K + 1):
        record.episodes.append(learner.run_episode(k))
    record.epochs = learner.epochs
    compute_diagnostics(record, v_star)
    log.info(
        f"[{run_id}] {K} episodes done: regret={record.diagnostics.final_regret:.4g} "
        f"epochs={len(record.epochs)} floor={floor:.3g}"
    )
    return record
