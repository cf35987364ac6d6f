"""
Infinite-horizon reduction of an SSP.

The goal becomes an ordinary state with reward 1 whose every action teleports
back to s0, so maximizing the gain of M∞ is minimizing the expected time to
the goal of the uniform-cost SSP: ρ_π = 1 / (1 + E[τ_π(s0)]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from ..ssp.chains import chain_of, reaches_goal
from ..ssp.model import SspInstance, StationaryPolicy
from ..ssp.planning import ssp_diameter

D_INFINITY_MAX_STATES = 20


@dataclass(frozen=True, eq=False)
class MInfinity:
    kernel: np.ndarray
    reward: np.ndarray
    start: int
    source: SspInstance

    @property
    def n_states(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.kernel.shape[1])

    @property
    def goal(self) -> int:
        return self.n_states - 1


def build_m_infinity(inst: SspInstance) -> MInfinity:
    S, A = inst.n_states, inst.n_actions
    kernel = np.zeros((S + 1, A, S + 1))
    kernel[:S] = inst.kernel
    kernel[S, :, inst.start] = 1.0
    reward = np.zeros(S + 1)
    reward[S] = 1.0
    kernel.setflags(write=False)
    reward.setflags(write=False)
    return MInfinity(kernel=kernel, reward=reward, start=inst.start, source=inst)


def _reachable_from(support: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(support.shape[0], dtype=bool)
    seen[start] = True
    while True:
        grown = seen | support[seen].any(axis=0)
        if np.array_equal(grown, seen):
            return seen
        seen = grown


def stationary_gain(m: MInfinity, pol: StationaryPolicy) -> float:
    """1 / (1 + E[τ_π(s0)]) when π reaches the goal almost surely from s0, else 0."""
    inst = m.source
    chain = chain_of(inst, pol)
    seen = _reachable_from(chain.q > 0, m.start)
    if not reaches_goal(chain)[seen].all():
        return 0.0
    idx = np.flatnonzero(seen)
    sub = chain.q[np.ix_(idx, idx)]
    times = scipy.linalg.solve(np.eye(idx.size) - sub, np.ones(idx.size))
    return 1.0 / (1.0 + float(times[np.searchsorted(idx, m.start)]))


def long_run_average(P: np.ndarray, r: np.ndarray, start: int) -> float:
    """
    lim (1/n) E[Σ_{t<n} r(X_t)] from ``start`` for a finite Markov chain.

    Closed communicating classes carry their stationary averages; transient
    states contribute through absorption probabilities.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    support = P > 0
    _, labels = connected_components(support, directed=True, connection="strong")
    closed: list[np.ndarray] = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        outside = np.ones(n, dtype=bool)
        outside[members] = False
        if not support[np.ix_(members, outside)].any():
            closed.append(members)

    averages = []
    for members in closed:
        block = P[np.ix_(members, members)]
        lhs = np.vstack([block.T - np.eye(members.size), np.ones(members.size)])
        rhs = np.zeros(members.size + 1)
        rhs[-1] = 1.0
        pi = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
        averages.append(float(pi @ r[members]))

    in_closed = np.zeros(n, dtype=bool)
    for i, members in enumerate(closed):
        in_closed[members] = True
        if start in members:
            return averages[i]

    transient = np.flatnonzero(~in_closed)
    pos = int(np.searchsorted(transient, start))
    fundamental = np.eye(transient.size) - P[np.ix_(transient, transient)]
    total = 0.0
    for members, avg in zip(closed, averages):
        into = P[np.ix_(transient, members)].sum(axis=1)
        absorb = scipy.linalg.solve(fundamental, into)
        total += absorb[pos] * avg
    return float(total)


def average_cost(inst: SspInstance, pol: StationaryPolicy) -> float:
    """Long-run cost per step of π in M∞ (the goal step costs 0)."""
    m = build_m_infinity(inst)
    rows = m.kernel[np.arange(m.n_states), np.append(pol.actions, 0)]
    costs = np.append(inst.costs[np.arange(inst.n_states), pol.actions], 0.0)
    return long_run_average(rows, costs, m.start)


def m_infinity_diameter(m: MInfinity) -> float | None:
    """max_{x≠y} min_π E[time x → y] in M∞; None above the size limit."""
    n = m.n_states
    if n > D_INFINITY_MAX_STATES:
        return None
    worst = 0.0
    for target in range(n):
        others = [s for s in range(n) if s != target]
        cols = others + [target]
        kernel = m.kernel[np.ix_(others, np.arange(m.n_actions), cols)]
        sub = SspInstance(kernel=kernel, costs=np.ones((n - 1, m.n_actions)), start=0, c_min=1.0, c_max=1.0)
        worst = max(worst, ssp_diameter(sub))
    return worst
