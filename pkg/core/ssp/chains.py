"""
Absorbing-chain analytics for stationary policies.

A proper policy turns an SSP into an absorbing Markov chain whose absorption
time follows a discrete phase-type law. Tails, expected hitting times and
factorial/raw moments are all computed from the (Q, R) block form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import stirling2

from ..constants import MAX_MOMENT_ORDER, PROB_TOL
from ..errors import ImproperPolicyError, InstanceError, PreconditionError, UnsupportedOrderError
from .model import SspInstance, StationaryPolicy


@dataclass(frozen=True, eq=False)
class AbsorbingChain:
    """Canonical form of a policy's chain: q between non-goal states, r into the goal."""

    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float, copy=True)
        r = np.array(self.r, dtype=float, copy=True).reshape(-1)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] != r.size:
            raise InstanceError(f"chain blocks do not match: q {q.shape}, r {r.shape}")
        if (q < 0).any() or (r < 0).any():
            raise InstanceError("chain has negative transition probabilities")
        rows = q.sum(axis=1) + r
        bad = np.flatnonzero(np.abs(rows - 1.0) > PROB_TOL * max(1, q.shape[0]))
        if bad.size:
            s = int(bad[0])
            raise InstanceError(f"chain row {s} sums to {rows[s]!r}")
        q.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @property
    def n_states(self) -> int:
        return int(self.r.size)


def chain_of(inst: SspInstance, pol: StationaryPolicy) -> AbsorbingChain:
    pol.check(inst)
    rows = inst.kernel[np.arange(inst.n_states), pol.actions]
    return AbsorbingChain(q=rows[:, : inst.n_states], r=rows[:, inst.goal])


def chain_from_rows(rows: np.ndarray) -> AbsorbingChain:
    """Build a chain from per-state rows over S ∪ {goal} (goal last)."""
    rows = np.asarray(rows, dtype=float)
    return AbsorbingChain(q=rows[:, :-1], r=rows[:, -1])


# ── Properness ──────────────────────────────────────────────


def reaches_goal(chain: AbsorbingChain) -> np.ndarray:
    """Mask of states from which the goal has positive reach probability."""
    ok = chain.r > 0
    support = chain.q > 0
    while True:
        grown = ok | (support & ok[None, :]).any(axis=1)
        if np.array_equal(grown, ok):
            return ok
        ok = grown


def is_proper(chain: AbsorbingChain) -> bool:
    # Finite chain: reaching the goal from every state with positive probability
    # is equivalent to reaching it with probability 1.
    return bool(reaches_goal(chain).all())


def spectral_radius(chain: AbsorbingChain) -> float:
    if chain.n_states == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(chain.q))))


def _factorize(chain: AbsorbingChain):
    if not is_proper(chain):
        stuck = np.flatnonzero(~reaches_goal(chain))
        raise ImproperPolicyError(
            f"I - Q is singular: states {stuck.tolist()} never reach the goal"
        )
    eye = np.eye(chain.n_states)
    return scipy.linalg.lu_factor(eye - chain.q)


# ── Tails and moments ───────────────────────────────────────


def hitting_tails(chain: AbsorbingChain, n: int) -> np.ndarray:
    """P(τ(s) > n) for every start state s, i.e. Q^n 1."""
    if n < 0:
        raise PreconditionError(f"tail index must be nonnegative, got {n}")
    v = np.ones(chain.n_states)
    for _ in range(n):
        v = chain.q @ v
    return v


def hitting_tail(chain: AbsorbingChain, start: int, n: int) -> float:
    return float(hitting_tails(chain, n)[start])


def expected_hitting_times(chain: AbsorbingChain) -> np.ndarray:
    """Row sums of the fundamental matrix (I - Q)^{-1}."""
    lu = _factorize(chain)
    return scipy.linalg.lu_solve(lu, np.ones(chain.n_states))


def ph_factorial_moments(chain: AbsorbingChain, order: int) -> np.ndarray:
    """
    Factorial moments E[(τ)_j] = j! (I - Q)^{-j} Q^{j-1} 1 for j = 1..order.

    Returns an array of shape (order, S); row j-1 holds the j-th moment for
    every start state.
    """
    if order < 1:
        raise PreconditionError(f"moment order must be >= 1, got {order}")
    lu = _factorize(chain)
    out = np.empty((order, chain.n_states))
    u = scipy.linalg.lu_solve(lu, np.ones(chain.n_states))
    out[0] = u
    for j in range(2, order + 1):
        # (I - Q)^{-1} and Q commute.
        u = scipy.linalg.lu_solve(lu, chain.q @ u)
        out[j - 1] = math.factorial(j) * u
    return out


def ph_factorial_moment(chain: AbsorbingChain, start: int, r: int) -> float:
    return float(ph_factorial_moments(chain, r)[r - 1, start])


def ph_raw_moment(chain: AbsorbingChain, start: int, r: int) -> float:
    """E[τ^r] from factorial moments through Stirling numbers of the second kind."""
    if r > MAX_MOMENT_ORDER:
        raise UnsupportedOrderError(f"moment order {r} exceeds {MAX_MOMENT_ORDER}")
    factorial = ph_factorial_moments(chain, r)[:, start]
    total = 0.0
    for j in range(1, r + 1):
        total += float(stirling2(r, j, exact=True)) * factorial[j - 1]
    return total


# ── Simulation ──────────────────────────────────────────────


def simulate_hitting_times(
    chain: AbsorbingChain,
    start: int,
    n_samples: int,
    rng: np.random.Generator,
    max_steps: int = 1_000_000,
) -> np.ndarray:
    """Monte Carlo absorption times from ``start``; used to cross-check the exact formulas."""
    rows = np.concatenate([chain.q, chain.r[:, None]], axis=1)
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    goal = chain.n_states
    state = np.full(n_samples, start, dtype=np.int64)
    times = np.zeros(n_samples, dtype=np.int64)
    alive = np.ones(n_samples, dtype=bool)
    for _ in range(max_steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        u = rng.random(idx.size)
        nxt = (cdf[state[idx]] < u[:, None]).sum(axis=1)
        times[idx] += 1
        state[idx] = nxt
        alive[idx] = nxt != goal
    return times
