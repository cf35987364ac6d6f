"""
Exact planning oracles on a known SSP.

All greedy argmins break ties toward the lowest action index (``np.argmin``
returns the first minimizer).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..constants import DIVERGENCE_BOUND, PROPER_ORACLE_ETA, VI_MAX_ITER, VI_TOL
from ..errors import DivergenceError, ImproperPolicyError, PreconditionError
from .chains import chain_of, is_proper, reaches_goal
from .model import SspInstance, StationaryPolicy

log = logging.getLogger("ssplab.oracle")


@dataclass(frozen=True, eq=False)
class Solution:
    values: np.ndarray
    policy: StationaryPolicy
    iterations: int
    residual: float = 0.0
    degenerate_cap: bool = False

    def value_at(self, state: int) -> float:
        return float(self.values[state])


def q_values(kernel: np.ndarray, costs: np.ndarray, v: np.ndarray) -> np.ndarray:
    """c(s,a) + Σ_{s'} p(s'|s,a) v(s'), goal value 0."""
    return costs + kernel[:, :, :-1] @ v


def greedy_policy(kernel: np.ndarray, costs: np.ndarray, v: np.ndarray) -> StationaryPolicy:
    return StationaryPolicy(np.argmin(q_values(kernel, costs, v), axis=1))


def _value_iteration(
    kernel: np.ndarray,
    costs: np.ndarray,
    *,
    tol: float,
    max_iter: int,
    v0: np.ndarray | None = None,
    cap: float | None = None,
    label: str = "value iteration",
) -> tuple[np.ndarray, np.ndarray, int, float]:
    v = np.zeros(kernel.shape[0]) if v0 is None else np.array(v0, dtype=float)
    residual = np.inf
    for it in range(1, max_iter + 1):
        q = q_values(kernel, costs, v)
        v_new = q.min(axis=1)
        if cap is not None:
            v_new = np.minimum(v_new, cap)
        diff = np.abs(v_new - v)
        residual = float(diff.max()) if diff.size else 0.0
        if residual <= tol:
            actions = np.argmin(q_values(kernel, costs, v_new), axis=1)
            return v_new, actions, it, residual
        if not np.isfinite(v_new).all() or v_new.max() > DIVERGENCE_BOUND:
            raise DivergenceError(f"{label} diverged after {it} sweeps", int(np.argmax(v_new)), residual)
        v = v_new
    raise DivergenceError(
        f"{label} did not reach tol {tol:g} in {max_iter} sweeps", int(np.argmax(diff)), residual
    )


def exact_value_iteration(
    inst: SspInstance,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
    *,
    costs: np.ndarray | None = None,
    cost_offset: float = 0.0,
    v0: np.ndarray | None = None,
) -> Solution:
    """Iterate the optimal Bellman operator L from ``v0`` (default 0) until ‖LV - V‖∞ ≤ tol."""
    c = (inst.costs if costs is None else np.asarray(costs, dtype=float)) + cost_offset
    if c.min() <= 0:
        raise PreconditionError(
            "exact value iteration needs strictly positive costs; "
            "use proper_value_iteration or truncated_value_iteration"
        )
    values, actions, it, residual = _value_iteration(
        inst.kernel, c, tol=tol, max_iter=max_iter, v0=v0, label="exact value iteration"
    )
    return Solution(values, StationaryPolicy(actions), it, residual)


def truncated_value_iteration(
    inst: SspInstance,
    J: float,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
    *,
    costs: np.ndarray | None = None,
    v0: np.ndarray | None = None,
) -> Solution:
    """
    Fixed point of L_J V = min{J, L V}; every value is at most J.

    Starting from ``v0 = J`` reaches the largest fixed point, which zero-cost
    loops cannot pin at 0.
    """
    if J < 0:
        raise PreconditionError(f"penalty cap must be nonnegative, got {J}")
    c = inst.costs if costs is None else np.asarray(costs, dtype=float)
    values, actions, it, residual = _value_iteration(
        inst.kernel, c, tol=tol, max_iter=max_iter, v0=v0, cap=float(J), label="truncated value iteration"
    )
    return Solution(values, StationaryPolicy(actions), it, residual, degenerate_cap=J == 0)


def truncated_proper_value_iteration(
    inst: SspInstance,
    J: float,
    eta: float = PROPER_ORACLE_ETA,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
) -> Solution:
    """Capped value for costs that may be zero: L_J on costs + ``eta``, iterated down from J."""
    if eta <= 0:
        raise PreconditionError(f"perturbation must be positive, got {eta}")
    if J <= 0:
        raise PreconditionError(f"penalty cap must be positive, got {J}")
    return truncated_value_iteration(
        inst, J, tol=tol, max_iter=max_iter, costs=inst.costs + eta, v0=np.full(inst.n_states, float(J))
    )


# ── Reachability and hitting times ──────────────────────────


def almost_sure_reachable(inst: SspInstance) -> tuple[np.ndarray, np.ndarray]:
    """
    States that can reach the goal with probability 1 under some policy.

    Returns (state mask, safe-action mask). An action is safe when its support
    stays inside the winning set plus the goal.
    """
    S = inst.n_states
    support = inst.kernel > 0
    win = np.ones(S, dtype=bool)
    while True:
        inside = np.concatenate([win, [True]])
        safe = ~(support & ~inside[None, None, :]).any(axis=2)
        # positive-probability reachability using safe actions only
        reach = np.zeros(S, dtype=bool)
        frontier = (safe & support[:, :, inst.goal]).any(axis=1)
        while not np.array_equal(frontier, reach):
            reach = frontier
            target = np.concatenate([reach, [True]])
            frontier = reach | (safe & (support & target[None, None, :]).any(axis=2)).any(axis=1)
        shrunk = win & reach
        if np.array_equal(shrunk, win):
            inside = np.concatenate([win, [True]])
            safe = ~(support & ~inside[None, None, :]).any(axis=2) & win[:, None]
            return win, safe
        win = shrunk


def _winning_value_iteration(
    inst: SspInstance,
    costs: np.ndarray,
    *,
    tol: float,
    max_iter: int,
    label: str,
) -> Solution:
    S = inst.n_states
    win, safe = almost_sure_reachable(inst)
    values = np.full(S, np.inf)
    actions = np.zeros(S, dtype=np.int64)
    it, residual = 0, 0.0
    if win.any():
        idx = np.flatnonzero(win)
        cols = np.concatenate([idx, [inst.goal]])
        sub_kernel = inst.kernel[np.ix_(idx, np.arange(inst.n_actions), cols)]
        sub_costs = np.where(safe[idx], costs[idx], np.inf)
        sub_values, sub_actions, it, residual = _value_iteration(
            sub_kernel, sub_costs, tol=tol, max_iter=max_iter, label=label
        )
        values[idx] = sub_values
        actions[idx] = sub_actions
    return Solution(values, StationaryPolicy(actions), it, residual)


def min_hitting_time_policy(
    inst: SspInstance,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
) -> Solution:
    """
    Uniform-cost value iteration: min_π E[τ_π(s)] and a proper policy attaining it.

    States outside the almost-sure winning set get value inf (their policy entry
    is action 0 and carries no meaning).
    """
    unit = np.ones((inst.n_states, inst.n_actions))
    return _winning_value_iteration(inst, unit, tol=tol, max_iter=max_iter, label="hitting-time value iteration")


def winning_value_iteration(
    inst: SspInstance,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
) -> Solution:
    """
    V* on instances with dead ends: value iteration over the almost-sure winning
    set using safe actions only. Every other state gets value inf.
    """
    if inst.costs.min() <= 0:
        raise PreconditionError("winning-set value iteration needs strictly positive costs")
    return _winning_value_iteration(inst, inst.costs, tol=tol, max_iter=max_iter, label="winning-set value iteration")


def ssp_diameter(inst: SspInstance, tol: float = VI_TOL, max_iter: int = VI_MAX_ITER) -> float:
    try:
        sol = min_hitting_time_policy(inst, tol=tol, max_iter=max_iter)
    except DivergenceError:
        return float("inf")
    top = float(sol.values.max())
    return float("inf") if top > DIVERGENCE_BOUND else top


def evaluate_policy(
    inst: SspInstance,
    pol: StationaryPolicy,
    costs: np.ndarray | None = None,
) -> np.ndarray:
    """V^π = (I - Q_π)^{-1} c_π; raises ImproperPolicyError for improper policies."""
    chain = chain_of(inst, pol)
    if not is_proper(chain):
        stuck = np.flatnonzero(~reaches_goal(chain))
        raise ImproperPolicyError(f"policy never reaches the goal from states {stuck.tolist()}")
    c = inst.costs if costs is None else np.asarray(costs, dtype=float)
    c_pi = c[np.arange(inst.n_states), pol.actions]
    return scipy.linalg.solve(np.eye(inst.n_states) - chain.q, c_pi)


def proper_value_iteration(
    inst: SspInstance,
    eta: float = PROPER_ORACLE_ETA,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
) -> Solution:
    """
    Best proper policy for costs that may be zero.

    Costs are perturbed by ``eta`` and the optimal operator is iterated downward
    from the value of the minimum-hitting-time policy, which is proper. The
    iterate is non-increasing, so zero-cost cycles cannot hold it at 0.
    """
    if eta <= 0:
        raise PreconditionError(f"perturbation must be positive, got {eta}")
    start = min_hitting_time_policy(inst, tol=tol, max_iter=max_iter)
    if not np.isfinite(start.values).all():
        raise PreconditionError("instance is not SSP-communicating; no proper policy exists")
    costs = inst.costs + eta
    v0 = evaluate_policy(inst, start.policy, costs)
    values, actions, it, residual = _value_iteration(
        inst.kernel, costs, tol=tol, max_iter=max_iter, v0=v0, label="proper value iteration"
    )
    log.debug(f"proper oracle converged in {it} sweeps, V*(s0)={values[inst.start]:.6g}")
    return Solution(values, StationaryPolicy(actions), it, residual)


def optimal_value(inst: SspInstance, tol: float = VI_TOL, max_iter: int = VI_MAX_ITER) -> Solution:
    """Exact VI when every cost is positive, the proper oracle otherwise."""
    if inst.costs.min() > 0:
        return exact_value_iteration(inst, tol=tol, max_iter=max_iter)
    return proper_value_iteration(inst, tol=tol, max_iter=max_iter)
