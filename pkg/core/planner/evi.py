"""
Extended value iteration for SSP (sup-norm stopping) and the pivot horizon.

The extended operator minimizes over every plausible kernel:

    L̃ v(s) = min_a [ c(s,a) + min_{p̃ ∈ B(s,a)} Σ_y p̃(y) v(y) ]

with v(goal) = 0. Iteration starts at v₀ = 0 and stops once
‖v_{m+1} - v_m‖∞ ≤ ε; the returned ṽ is v_m, so L̃ṽ ≤ ṽ + ε holds exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..constants import EVI_MAX_SWEEPS, H_MAX
from ..errors import InfeasibleBoxError, NonContractionError, PreconditionError
from ..ssp.chains import AbsorbingChain, chain_from_rows, expected_hitting_times, is_proper
from ..ssp.model import StationaryPolicy
from .confidence import ConfidenceModel, ConfidenceSnapshot

log = logging.getLogger("ssplab.planner")


# ── Inner minimization ──────────────────────────────────────


def _l1_shift(p_hat: np.ndarray, radii: np.ndarray, order: np.ndarray) -> np.ndarray:
    p = np.take(p_hat, order, axis=-1).astype(float, copy=True)
    p[..., 0] = np.minimum(1.0, p[..., 0] + radii / 2.0)
    excess = p.sum(axis=-1) - 1.0
    # mass still available strictly after position j (worst states are last)
    after = np.cumsum(p[..., ::-1], axis=-1)[..., ::-1] - p
    remove = np.clip(excess[..., None] - after, 0.0, p)
    remove[..., 0] = 0.0
    p -= remove
    out = np.empty_like(p)
    out[..., order] = p
    return out


def _box_fill(p_hat: np.ndarray, radii: np.ndarray, order: np.ndarray) -> np.ndarray:
    lo = np.maximum(0.0, p_hat - radii)
    hi = np.minimum(1.0, p_hat + radii)
    if (hi.sum(axis=-1) < 1.0 - 1e-12).any():
        raise InfeasibleBoxError("per-element box upper bounds sum below 1")
    budget = 1.0 - lo.sum(axis=-1)
    room = np.take(hi - lo, order, axis=-1)
    before = np.cumsum(room, axis=-1) - room
    fill = np.clip(budget[..., None] - before, 0.0, room)
    p = np.take(lo, order, axis=-1) + fill
    out = np.empty_like(p)
    out[..., order] = p
    return out


def inner_min(p_hat_row: np.ndarray, radii, v: np.ndarray, mode: str) -> np.ndarray:
    """
    Exact minimizer of ⟨p̃, v⟩ over the confidence set around ``p_hat_row``.

    ``v`` carries the goal value 0 at its last index. Works on a single row or a
    stack of rows sharing the same ``v``. Ties in v go to the lowest index.
    """
    p_hat_row = np.asarray(p_hat_row, dtype=float)
    order = np.argsort(np.asarray(v, dtype=float), kind="stable")
    if mode == "bernstein":
        return _box_fill(p_hat_row, np.asarray(radii, dtype=float), order)
    return _l1_shift(p_hat_row, np.asarray(radii, dtype=float), order)


# ── Pivot horizon ───────────────────────────────────────────


class PivotHorizon(NamedTuple):
    H: int
    capped: bool


def pivot_horizon(q_tilde: AbsorbingChain | np.ndarray, gamma: float, h_max: int = H_MAX) -> PivotHorizon:
    """Smallest n > 1 with max_s (Q̃^{n-1} 1)(s) ≤ γ, capped at ``h_max``."""
    if not 0 < gamma <= 1:
        raise PreconditionError(f"gamma must lie in (0, 1], got {gamma}")
    q = q_tilde.q if isinstance(q_tilde, AbsorbingChain) else np.asarray(q_tilde, dtype=float)
    v = np.ones(q.shape[0])
    for n in range(2, max(h_max, 2) + 1):
        v = q @ v
        if v.size == 0 or v.max() <= gamma:
            return PivotHorizon(n, False)
    log.warning(f"Pivot horizon capped at {h_max} (gamma={gamma:.3g}, tail={v.max():.3g})")
    return PivotHorizon(h_max, True)


# ── Operators and EVI ───────────────────────────────────────


@dataclass(frozen=True)
class Operator:
    kind: str = "plain"
    J: float | None = None
    eta: float = 0.0

    @classmethod
    def plain(cls) -> "Operator":
        return cls()

    @classmethod
    def truncated(cls, J: float, eta: float = 0.0) -> "Operator":
        """L_J, optionally on costs shifted by ``eta``."""
        if J <= 0:
            raise PreconditionError(f"penalty cap J must be positive, got {J}")
        if eta < 0:
            raise PreconditionError(f"perturbation eta must be nonnegative, got {eta}")
        return cls("truncated", J=float(J), eta=float(eta))

    @classmethod
    def perturbed(cls, eta: float) -> "Operator":
        if eta <= 0:
            raise PreconditionError(f"perturbation eta must be positive, got {eta}")
        return cls("perturbed", eta=float(eta))


@dataclass(frozen=True, eq=False)
class PlanResult:
    v_tilde: np.ndarray
    policy: StationaryPolicy
    p_tilde: np.ndarray
    q_tilde: AbsorbingChain
    q_hat: AbsorbingChain
    pivot_horizon: int
    horizon_capped: bool
    iterations: int
    residual: float
    stopping_gap: float
    epsilon: float

    def optimistic_hitting_time(self, state: int) -> float:
        """E[τ̃(state)] under the optimistic chain; inf when the greedy policy is improper there."""
        if not is_proper(self.q_tilde):
            return float("inf")
        return float(expected_hitting_times(self.q_tilde)[state])

    def empirical_hitting_time(self, state: int) -> float:
        """E[τ(state)] of the greedy policy under the empirical kernel p̂; inf when improper there."""
        if not is_proper(self.q_hat):
            return float("inf")
        return float(expected_hitting_times(self.q_hat)[state])


def extended_q(snapshot: ConfidenceSnapshot, costs: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Q̃(s,a) and the optimistic kernel for every (s,a) at value ``v`` (goal excluded)."""
    v_ext = np.append(v, 0.0)
    p_tilde = inner_min(snapshot.p_hat, snapshot.radii, v_ext, snapshot.mode)
    return costs + p_tilde @ v_ext, p_tilde


def evi_ssp(
    model: ConfidenceModel | ConfidenceSnapshot,
    costs: np.ndarray,
    epsilon: float,
    operator: Operator | None = None,
    *,
    gamma: float | None = None,
    horizon: int | None = None,
    h_max: int = H_MAX,
    max_sweeps: int = EVI_MAX_SWEEPS,
) -> PlanResult:
    """
    Optimistic planning on the confidence set.

    ``gamma`` selects the pivot horizon of the greedy optimistic chain;
    ``horizon`` fixes it instead (finite-penalty phase ①). With neither the
    horizon is reported as ``h_max``.
    """
    operator = operator or Operator.plain()
    snapshot = model.snapshot() if isinstance(model, ConfidenceModel) else model
    if epsilon <= 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    c = np.asarray(costs, dtype=float) + operator.eta
    if c.shape != (snapshot.n_states, snapshot.n_actions):
        raise PreconditionError(f"cost table shape {c.shape} does not match the model")
    if operator.kind == "plain" and c.min() <= 0:
        raise PreconditionError("plain extended value iteration needs strictly positive costs")
    if (c < 0).any():
        raise PreconditionError("costs must be nonnegative")
    cap = operator.J if operator.kind == "truncated" else None

    v = np.zeros(snapshot.n_states)
    for sweep in range(1, max_sweeps + 1):
        q, p_all = extended_q(snapshot, c, v)
        v_next = q.min(axis=1)
        if cap is not None:
            v_next = np.minimum(v_next, cap)
        gap = v_next - v
        residual = float(np.abs(gap).max())
        if residual <= epsilon:
            break
        v = v_next
    else:
        worst = int(np.argmax(np.abs(gap)))
        raise NonContractionError(
            f"extended value iteration exceeded {max_sweeps} sweeps", worst, residual
        )

    actions = np.argmin(q, axis=1)
    rows = p_all[np.arange(snapshot.n_states), actions]
    q_tilde = chain_from_rows(rows)
    q_hat = chain_from_rows(snapshot.p_hat[np.arange(snapshot.n_states), actions])
    if horizon is not None:
        H, capped = max(1, int(horizon)), False
    elif gamma is not None:
        H, capped = pivot_horizon(q_tilde, gamma, h_max)
    else:
        H, capped = h_max, False
    log.debug(
        f"plan: {sweep} sweeps, residual={residual:.3e}, eps={epsilon:.3e}, H={H}"
        + (" (capped)" if capped else "")
    )
    return PlanResult(
        v_tilde=v,
        policy=StationaryPolicy(actions),
        p_tilde=rows,
        q_tilde=q_tilde,
        q_hat=q_hat,
        pivot_horizon=H,
        horizon_capped=capped,
        iterations=sweep,
        residual=residual,
        stopping_gap=float(gap.max()),
        epsilon=epsilon,
    )
