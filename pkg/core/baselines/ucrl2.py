"""UCRL2 on the infinite-horizon reduction, with known rewards."""

from __future__ import annotations

import logging

import numpy as np

from ..environments.env import make_environment
from ..errors import PreconditionError
from ..planner.confidence import ConfidenceModel, ConfidenceSnapshot
from ..planner.evi import inner_min
from ..ssp.model import SspInstance, StationaryPolicy
from ..ssp.planning import exact_value_iteration
from ..types import RunRecord
from ..agent.diagnostics import compute_diagnostics
from .epochs import BaselineConfig, DoublingEpochLearner, EpochPlan

log = logging.getLogger("ssplab.baselines")


def extended_value_iteration_gain(
    snapshot: ConfidenceSnapshot,
    start: int,
    tolerance: float,
    max_sweeps: int,
) -> EpochPlan:
    """
    Optimistic average-reward planning on M∞ with span stopping.

    Non-goal states earn 0 and move by the most favourable plausible kernel;
    the goal earns 1 and teleports to ``start``. Each sweep averages the
    iterate with its image (aperiodicity transform with weight 1/2), which
    leaves the optimal policies unchanged and makes periodic chains converge.
    """
    S = snapshot.n_states
    u = np.zeros(S + 1)
    span = np.inf
    converged = False
    for sweep in range(1, max_sweeps + 1):
        p_tilde = inner_min(snapshot.p_hat, snapshot.radii, -u, snapshot.mode)
        q = p_tilde @ u
        image = np.append(q.max(axis=1), 1.0 + u[start])
        u_next = 0.5 * (u + image)
        diff = u_next - u
        span = float(diff.max() - diff.min())
        u = u_next - u_next.min()
        if span < tolerance:
            converged = True
            break
    if not converged:
        log.warning(f"UCRL2 extended VI stopped at {max_sweeps} sweeps with span {span:.3e} > {tolerance:.3e}")
    return EpochPlan(
        policy=StationaryPolicy(np.argmax(q, axis=1)),
        sweeps=sweep,
        residual=span,
        tolerance=tolerance,
        converged=converged,
    )


class Ucrl2Learner(DoublingEpochLearner):
    def __init__(self, env, model, cfg: BaselineConfig, *, run_id: str):
        super().__init__(env, model, run_id=run_id, replan_at_goal=cfg.replan_at_goal)
        self.cfg = cfg

    def plan(self, k: int) -> EpochPlan:
        return extended_value_iteration_gain(
            self.model.snapshot(),
            self.env.start,
            1.0 / np.sqrt(self.t),
            self.cfg.ucrl2_max_sweeps,
        )

    def on_goal(self) -> None:
        # the teleport step from the goal back to s0 is a step of M∞
        self.t += 1


def run_ucrl2(inst: SspInstance, cfg: BaselineConfig, K: int, *, v_star: float | None = None) -> RunRecord:
    """
    UCRL2 with doubling epochs on M∞. Episode lengths exclude the teleport
    step, so the SSP-regret Σ cost − K·V*(s0) equals the M∞ form
    T_K + K − (V*(s0) + 1)·K for unit costs.
    """
    cfg.validate()
    if K < 1:
        raise PreconditionError(f"need at least one episode, got K={K}")
    if np.ptp(inst.costs) > 0:
        raise PreconditionError("UCRL2 on M∞ needs uniform costs")
    if v_star is None:
        v_star = exact_value_iteration(inst, tol=cfg.oracle_tol).value_at(inst.start)
    env = make_environment(inst, cfg.seed)
    model = ConfidenceModel(inst.n_states, inst.n_actions, cfg.confidence_mode, cfg.delta)
    run_id = f"ucrl2:{cfg.seed}"
    learner = Ucrl2Learner(env, model, cfg, run_id=run_id)
    record = RunRecord(algorithm="ucrl2", seed=cfg.seed, K=K, v_star=v_star, c_max=inst.c_max)
    for k in range(1, K + 1):
        record.episodes.append(learner.run_episode(k))
    record.epochs = learner.epochs
    compute_diagnostics(record, v_star)
    log.info(
        f"[{run_id}] {K} episodes done: regret={record.diagnostics.final_regret:.4g} "
        f"epochs={len(record.epochs)}"
    )
    return record
