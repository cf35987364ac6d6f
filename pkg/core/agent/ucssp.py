"""
UC-SSP learning loop.

Each episode starts with a phase-① attempt planned on the true (or
optimistic, with unknown costs) costs and cut at its pivot horizon. If the goal
is not reached, phase-② attempts plan on unit costs, so they only minimize the
time to the goal, each cut at its own pivot horizon, until the goal is reached.
Visit counts are frozen during an attempt and folded in between attempts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..constants import CONFIDENCE_MODES, DEFAULT_DELTA, EVI_MAX_SWEEPS, H_MAX, VI_TOL
from ..environments.env import Environment, make_environment
from ..errors import PreconditionError
from ..planner.confidence import ConfidenceModel
from ..planner.evi import Operator, PlanResult, evi_ssp
from ..ssp.model import SspInstance
from ..ssp.planning import (
    almost_sure_reachable,
    exact_value_iteration,
    proper_value_iteration,
    truncated_proper_value_iteration,
    truncated_value_iteration,
)
from ..types import AttemptLog, EpisodeLog, RunRecord
from .diagnostics import compute_diagnostics

log = logging.getLogger("ssplab.agent")

VARIANTS = ("standard", "finite_penalty", "perturbed", "finite_penalty_perturbed")
PENALTY_VARIANTS = ("finite_penalty", "finite_penalty_perturbed")


@dataclass
class AgentConfig:
    delta: float = DEFAULT_DELTA
    confidence_mode: str = "hoeffding_experimental"
    variant: str = "standard"
    penalty_J: float | None = None
    h_max: int = H_MAX
    evi_max_sweeps: int = EVI_MAX_SWEEPS
    seed: int = 0
    use_pivot_horizon: bool = True
    stochastic_costs: bool = False
    log_chains: bool = False
    check_membership: bool = False
    oracle_tol: float = VI_TOL

    @property
    def uses_reset(self) -> bool:
        return self.variant in PENALTY_VARIANTS

    def validate(self) -> None:
        if not 0 < self.delta < 1:
            raise PreconditionError(f"delta must lie in (0, 1), got {self.delta}")
        if self.confidence_mode not in CONFIDENCE_MODES:
            raise PreconditionError(f"unknown confidence mode {self.confidence_mode!r}")
        if self.variant not in VARIANTS:
            raise PreconditionError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.variant in PENALTY_VARIANTS and (self.penalty_J is None or self.penalty_J <= 0):
            raise PreconditionError("finite-penalty variant needs a positive penalty J")
        if self.variant in PENALTY_VARIANTS and self.stochastic_costs:
            raise PreconditionError("finite-penalty variant runs with known costs only")
        if self.h_max < 2:
            raise PreconditionError(f"h_max must be at least 2, got {self.h_max}")


def eta_schedule(k: int) -> float:
    """Phase-① cost perturbation k^{-1/3}."""
    return float(k) ** (-1.0 / 3.0)


def finite_penalty_horizon(k: int, J: float, c_min: float) -> int:
    """ceil(6 (J / c_min) log(2√k)), at least 1. Perturbed runs pass c_min + η_k."""
    if c_min <= 0:
        raise PreconditionError(f"finite-penalty horizon needs a positive cost floor, got {c_min}")
    return max(1, math.ceil(6.0 * (J / c_min) * math.log(2.0 * math.sqrt(k))))


class UcSspAgent:
    """Learner state for one run; talks to the environment through reset/step only."""

    def __init__(
        self,
        env: Environment,
        cfg: AgentConfig,
        *,
        n_actions: int | None = None,
        membership_check: Callable[[ConfidenceModel], bool] | None = None,
        run_id: str = "ucssp",
    ):
        cfg.validate()
        self.env = env
        self.cfg = cfg
        self.n_states = env.n_states
        # finite-penalty runs hide the trailing reset action from the planner
        self.n_actions = env.n_actions if n_actions is None else n_actions
        self.c_min = env.c_min
        self.c_max = env.c_max
        self.model = ConfidenceModel(
            self.n_states,
            self.n_actions,
            cfg.confidence_mode,
            cfg.delta,
            c_min=self.c_min,
            c_max=self.c_max,
            stochastic_costs=cfg.stochastic_costs,
        )
        self.membership_check = membership_check
        self.run_id = run_id
        self.t = 1
        self.G = 0
        self.attempts: list[AttemptLog] = []
        self._unit_costs = np.ones((self.n_states, self.n_actions))

    # ── planning ──

    def _phase1_costs(self) -> np.ndarray:
        if self.cfg.stochastic_costs:
            return self.model.cost_intervals()[0]
        return np.asarray(self.env.costs, dtype=float)[:, : self.n_actions]

    def _gamma(self, count: int) -> float | None:
        return 1.0 / math.sqrt(count) if self.cfg.use_pivot_horizon else None

    def plan_phase1(self, k: int) -> tuple[PlanResult, float | None]:
        cfg = self.cfg
        costs = self._phase1_costs()
        if cfg.uses_reset:
            if cfg.variant == "finite_penalty_perturbed":
                eta = eta_schedule(k)
                epsilon = float(costs.max()) / self.t
                operator = Operator.truncated(cfg.penalty_J, eta=eta)
                floor = self.c_min + eta
            else:
                epsilon = self.c_min / (2.0 * self.t)
                operator = Operator.truncated(cfg.penalty_J)
                floor = self.c_min
            plan = evi_ssp(
                self.model,
                costs,
                epsilon,
                operator,
                horizon=finite_penalty_horizon(k, cfg.penalty_J, floor),
                max_sweeps=cfg.evi_max_sweeps,
            )
            return plan, None
        gamma = self._gamma(k)
        if cfg.variant == "perturbed":
            epsilon = self.c_max / self.t
            operator = Operator.perturbed(eta_schedule(k))
        else:
            epsilon = self.c_min / (2.0 * self.t)
            operator = Operator.plain()
        plan = evi_ssp(
            self.model,
            costs,
            epsilon,
            operator,
            gamma=gamma,
            h_max=cfg.h_max,
            max_sweeps=cfg.evi_max_sweeps,
        )
        return plan, gamma

    def plan_phase2(self) -> tuple[PlanResult, float | None]:
        gamma = self._gamma(self.G)
        plan = evi_ssp(
            self.model,
            self._unit_costs,
            1.0 / (2.0 * self.t),
            Operator.plain(),
            gamma=gamma,
            h_max=self.cfg.h_max,
            max_sweeps=self.cfg.evi_max_sweeps,
        )
        return plan, gamma

    # ── acting ──

    def run_attempt(self, k: int, j: int, plan: PlanResult, gamma: float | None) -> AttemptLog:
        s = self.env.state
        attempt = AttemptLog(
            k=k,
            j=j,
            start_time=self.t,
            H=plan.pivot_horizon,
            start_state=s,
            epsilon=plan.epsilon,
            gamma=gamma,
            v_tilde_start=float(plan.v_tilde[s]),
            expected_tau_tilde=plan.optimistic_hitting_time(s),
            expected_tau_hat=plan.empirical_hitting_time(s),
            plan_iterations=plan.iterations,
            stopping_gap=plan.stopping_gap,
            horizon_capped=plan.horizon_capped,
        )
        if self.membership_check is not None:
            attempt.kernel_in_confidence = self.membership_check(self.model)
        if self.cfg.log_chains:
            attempt.chain_rows = plan.p_tilde.tolist()

        for _ in range(plan.pivot_horizon):
            a = plan.policy(s)
            s_next, cost = self.env.step(a)
            self.model.observe(s, a, s_next)
            if self.cfg.stochastic_costs:
                self.model.update_cost_bounds(s, a, cost)
            attempt.steps += 1
            attempt.cost += cost
            self.t += 1
            s = s_next
            if self.env.at_goal:
                attempt.reached_goal = True
                break
        self.model.absorb()
        self.attempts.append(attempt)
        log.debug(
            f"[{self.run_id}] attempt ({k},{j}): H={attempt.H} steps={attempt.steps} "
            f"goal={attempt.reached_goal} vtilde={attempt.v_tilde_start:.4g}"
        )
        return attempt

    def run_episode(self, k: int) -> EpisodeLog:
        self.env.reset()
        plan, gamma = self.plan_phase1(k)
        first = self.run_attempt(k, 0, plan, gamma)
        episode = EpisodeLog(
            k=k,
            phase1_steps=first.steps,
            phase1_cost=first.cost,
            H_k0=first.H,
            vtilde_s0=float(plan.v_tilde[self.env.start]),
            phase1_reached_goal=first.reached_goal,
        )

        if not first.reached_goal and self.cfg.uses_reset:
            reset_action = self.n_actions
            s = self.env.state
            _, cost = self.env.step(reset_action)
            self.t += 1
            episode.reset = True
            episode.phase1_steps += 1
            episode.phase1_cost += cost
            log.debug(f"[{self.run_id}] episode {k}: reset from state {s} at cost {cost:g}")

        j = 0
        while not self.env.at_goal:
            j += 1
            self.G += 1
            plan, gamma = self.plan_phase2()
            attempt = self.run_attempt(k, j, plan, gamma)
            episode.phase2_steps += attempt.steps
            episode.phase2_cost += attempt.cost

        episode.n_phase2_attempts = j
        episode.length = episode.phase1_steps + episode.phase2_steps
        episode.cost = episode.phase1_cost + episode.phase2_cost
        return episode


# ── run entry points ────────────────────────────────────────


def _membership_check(inst: SspInstance, n_actions: int) -> Callable[[ConfidenceModel], bool]:
    kernel = inst.kernel[:, :n_actions, :]
    return lambda model: model.contains(kernel)


def _run(
    inst: SspInstance,
    cfg: AgentConfig,
    K: int,
    *,
    algorithm: str,
    v_star: float,
    env_inst: SspInstance | None = None,
    n_actions: int | None = None,
) -> RunRecord:
    if K < 1:
        raise PreconditionError(f"need at least one episode, got K={K}")
    env = make_environment(env_inst or inst, cfg.seed, stochastic_costs=cfg.stochastic_costs)
    run_id = f"{algorithm}:{cfg.seed}"
    membership_check = _membership_check(inst, inst.n_actions) if cfg.check_membership else None
    agent = UcSspAgent(env, cfg, n_actions=n_actions, membership_check=membership_check, run_id=run_id)
    record = RunRecord(
        algorithm=algorithm,
        seed=cfg.seed,
        K=K,
        v_star=v_star,
        c_max=inst.c_max,
        penalty_J=cfg.penalty_J if cfg.uses_reset else None,
    )
    for k in range(1, K + 1):
        record.episodes.append(agent.run_episode(k))
    record.attempts = agent.attempts
    compute_diagnostics(record, v_star)
    diag = record.diagnostics
    log.info(
        f"[{run_id}] {K} episodes done: regret={diag.final_regret:.4g} "
        f"W_K={diag.W_K:.4g} F_K={diag.F_K} G_K={diag.G_K} T_K={diag.T_K}"
    )
    return record


def run_ucssp(inst: SspInstance, cfg: AgentConfig, K: int, *, v_star: float | None = None) -> RunRecord:
    """Standard UC-SSP; regret is measured against exact VI on the true instance."""
    if cfg.variant != "standard":
        raise PreconditionError(f"run_ucssp runs the standard variant, got {cfg.variant!r}")
    if inst.c_min <= 0:
        raise PreconditionError("standard UC-SSP needs c_min > 0; use run_ucssp_perturbed")
    win, _ = almost_sure_reachable(inst)
    if not win.all():
        raise PreconditionError("standard UC-SSP needs an SSP-communicating instance")
    if v_star is None:
        v_star = exact_value_iteration(inst, tol=cfg.oracle_tol).value_at(inst.start)
    return _run(inst, cfg, K, algorithm="ucssp", v_star=v_star)


def run_ucssp_finite_penalty(
    inst: SspInstance,
    cfg: AgentConfig,
    K: int,
    *,
    v_star: float | None = None,
) -> RunRecord:
    """
    Finite-penalty UC-SSP: plans with L_J over the original actions and resets
    (goal, cost J) after a failed phase ①. There is no phase ②.

    With variant ``finite_penalty_perturbed`` phase ① also adds η_k = k^{-1/3},
    so zero costs are allowed; regret is then measured against the capped value
    of the η-perturbed instance.
    """
    if cfg.variant not in PENALTY_VARIANTS:
        raise PreconditionError(f"finite-penalty runs need one of {PENALTY_VARIANTS}, got {cfg.variant!r}")
    perturbed = cfg.variant == "finite_penalty_perturbed"
    if perturbed and inst.c_max <= 0:
        raise PreconditionError("perturbed finite-penalty UC-SSP needs c_max > 0")
    if not perturbed and inst.c_min <= 0:
        raise PreconditionError("finite-penalty UC-SSP needs c_min > 0; use variant 'finite_penalty_perturbed'")
    if v_star is None:
        if perturbed:
            v_star = truncated_proper_value_iteration(inst, cfg.penalty_J, tol=cfg.oracle_tol).value_at(inst.start)
        else:
            v_star = truncated_value_iteration(inst, cfg.penalty_J, tol=cfg.oracle_tol).value_at(inst.start)
    env_inst = inst.with_reset_action(cfg.penalty_J)
    return _run(
        inst,
        cfg,
        K,
        algorithm="ucssp_J_eta" if perturbed else "ucssp_J",
        v_star=v_star,
        env_inst=env_inst,
        n_actions=inst.n_actions,
    )


def run_ucssp_perturbed(
    inst: SspInstance,
    cfg: AgentConfig,
    K: int,
    *,
    v_star: float | None = None,
) -> RunRecord:
    """UC-SSP for zero costs: phase ① adds η_k = k^{-1/3}; compared against the best proper policy."""
    if cfg.variant != "perturbed":
        raise PreconditionError(f"perturbed runs need variant 'perturbed', got {cfg.variant!r}")
    if inst.c_max <= 0:
        raise PreconditionError("perturbed UC-SSP needs c_max > 0")
    if v_star is None:
        v_star = proper_value_iteration(inst, tol=cfg.oracle_tol).value_at(inst.start)
    return _run(inst, cfg, K, algorithm="ucssp_eta", v_star=v_star)
