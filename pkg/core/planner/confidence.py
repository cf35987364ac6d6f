"""
Confidence sets over transition kernels and costs.

Counts live in two tables: ``N`` (frozen, used for planning) and ``ν`` (visits
since the last fold). Learners call ``absorb`` at attempt or epoch boundaries.
The next-state axis has width S + 1 with the goal last, and every radius uses
that width as its state count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import CONFIDENCE_MODES, L1_MODES
from ..errors import ConfidenceModeError, CostDataError, PreconditionError


def _check_mode(mode: str, allowed: tuple[str, ...]) -> None:
    if mode not in allowed:
        raise ConfidenceModeError(f"confidence mode {mode!r} not in {allowed}")


def _log_term(n_next: int, n_actions: int, n_plus, delta: float):
    return np.log(n_next * n_actions * np.asarray(n_plus, dtype=float) / delta)


def l1_radii(n_plus, n_next: int, n_actions: int, mode: str, delta: float) -> np.ndarray:
    """Vectorized L1 radius for an array of N⁺ values."""
    _check_mode(mode, L1_MODES)
    n_plus = np.maximum(1.0, np.asarray(n_plus, dtype=float))
    if mode == "hoeffding_theoretical":
        return np.sqrt(8.0 * n_next * np.log(2.0 * n_actions * n_plus / delta) / n_plus)
    return np.sqrt(n_next * _log_term(n_next, n_actions, n_plus, delta) / n_plus)


def bernstein_radii(counts_sas: np.ndarray, delta: float) -> np.ndarray:
    """Per-element radii sqrt(p̂(1-p̂) L / N⁺) + L / N⁺ for a full (S, A, S+1) count table."""
    counts_sas = np.asarray(counts_sas, dtype=float)
    _, n_actions, n_next = counts_sas.shape
    n = counts_sas.sum(axis=2)
    n_plus = np.maximum(1.0, n)
    p_hat = _empirical(counts_sas)
    log_term = _log_term(n_next, n_actions, n_plus, delta)[..., None]
    var = p_hat * (1.0 - p_hat)
    return np.sqrt(var * log_term / n_plus[..., None]) + log_term / n_plus[..., None]


def cost_radius(n_plus, n_next: int, n_actions: int, delta: float):
    n_plus = np.maximum(1.0, np.asarray(n_plus, dtype=float))
    return 2.0 * np.sqrt(np.log(6.0 * n_next * n_actions * n_plus / delta) / n_plus)


def _visits(counts: np.ndarray) -> tuple[np.ndarray, int]:
    counts = np.asarray(counts)
    if counts.ndim == 3:
        return counts.sum(axis=2), counts.shape[2]
    if counts.ndim == 2:
        return counts, counts.shape[0] + 1
    raise PreconditionError(f"counts must be (S, A) or (S, A, S+1), got {counts.shape}")


def radius_l1(counts: np.ndarray, s: int, a: int, mode: str, delta: float) -> float:
    visits, n_next = _visits(counts)
    return float(l1_radii(visits[s, a], n_next, visits.shape[1], mode, delta))


def radius_bernstein(counts: np.ndarray, s: int, a: int, s_next: int, delta: float) -> float:
    counts = np.asarray(counts)
    if counts.ndim != 3:
        raise PreconditionError("Bernstein radii need per-next-state counts (S, A, S+1)")
    return float(bernstein_radii(counts[s : s + 1, :, :], delta)[0, a, s_next])


def _empirical(counts_sas: np.ndarray) -> np.ndarray:
    n = counts_sas.sum(axis=2, keepdims=True)
    uniform = np.full_like(counts_sas, 1.0 / counts_sas.shape[2], dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(n > 0, counts_sas / np.maximum(n, 1), uniform)
    return p


@dataclass(frozen=True, eq=False)
class ConfidenceSnapshot:
    """Immutable view of a ConfidenceModel handed to the planners."""

    p_hat: np.ndarray
    radii: np.ndarray
    mode: str
    counts: np.ndarray
    cost_lower: np.ndarray | None = None

    @property
    def n_states(self) -> int:
        return int(self.p_hat.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.p_hat.shape[1])


class ConfidenceModel:
    """Visit counts, empirical kernel, radii and optional cost statistics."""

    def __init__(
        self,
        n_states: int,
        n_actions: int,
        mode: str = "hoeffding_experimental",
        delta: float = 0.1,
        *,
        c_min: float = 0.0,
        c_max: float = 1.0,
        stochastic_costs: bool = False,
    ):
        _check_mode(mode, CONFIDENCE_MODES)
        if not 0 < delta < 1:
            raise PreconditionError(f"delta must lie in (0, 1), got {delta}")
        self.n_states = n_states
        self.n_actions = n_actions
        self.mode = mode
        self.delta = delta
        self.c_min = c_min
        self.c_max = c_max
        self.stochastic_costs = stochastic_costs
        self.counts_sas = np.zeros((n_states, n_actions, n_states + 1), dtype=np.int64)
        self.pending_sas = np.zeros_like(self.counts_sas)
        self.cost_sum = np.zeros((n_states, n_actions))
        self.cost_count = np.zeros((n_states, n_actions), dtype=np.int64)

    # ── counters ──

    @property
    def counts(self) -> np.ndarray:
        """N(s,a) of the frozen table."""
        return self.counts_sas.sum(axis=2)

    @property
    def pending(self) -> np.ndarray:
        """ν(s,a): visits since the last fold."""
        return self.pending_sas.sum(axis=2)

    def observe(self, s: int, a: int, s_next: int) -> None:
        self.pending_sas[s, a, s_next] += 1

    def absorb(self) -> int:
        """Fold ν into N; returns the number of folded visits."""
        moved = int(self.pending_sas.sum())
        self.counts_sas += self.pending_sas
        self.pending_sas[:] = 0
        return moved

    # ── kernel statistics ──

    def p_hat(self) -> np.ndarray:
        return _empirical(self.counts_sas)

    def radii(self) -> np.ndarray:
        """(S, A) L1 radii, or (S, A, S+1) per-element radii in Bernstein mode."""
        if self.mode == "bernstein":
            return bernstein_radii(self.counts_sas, self.delta)
        return l1_radii(self.counts, self.n_states + 1, self.n_actions, self.mode, self.delta)

    def contains(self, kernel: np.ndarray) -> bool:
        """Whether ``kernel`` lies in every confidence ball (post-hoc check only)."""
        diff = np.asarray(kernel, dtype=float) - self.p_hat()
        radii = self.radii()
        if self.mode == "bernstein":
            return bool((np.abs(diff) <= radii + 1e-12).all())
        return bool((np.abs(diff).sum(axis=2) <= radii + 1e-12).all())

    # ── cost statistics ──

    def update_cost_bounds(self, s: int, a: int, observed_cost: float) -> tuple[float, float]:
        if not self.stochastic_costs:
            raise PreconditionError("cost statistics are only kept in stochastic-cost mode")
        if not self.c_min - 1e-12 <= observed_cost <= self.c_max + 1e-12:
            raise CostDataError(
                f"observed cost {observed_cost} outside [{self.c_min}, {self.c_max}] at ({s}, {a})"
            )
        self.cost_sum[s, a] += observed_cost
        self.cost_count[s, a] += 1
        return self.cost_interval(s, a)

    def cost_hat(self) -> np.ndarray:
        mid = 0.5 * (self.c_min + self.c_max)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.cost_count > 0, self.cost_sum / np.maximum(self.cost_count, 1), mid)

    def cost_intervals(self) -> tuple[np.ndarray, np.ndarray]:
        radius = cost_radius(self.cost_count, self.n_states + 1, self.n_actions, self.delta)
        c_hat = self.cost_hat()
        lo = np.clip(c_hat - radius, self.c_min, self.c_max)
        hi = np.clip(c_hat + radius, self.c_min, self.c_max)
        unseen = self.cost_count == 0
        lo = np.where(unseen, self.c_min, lo)
        hi = np.where(unseen, self.c_max, hi)
        return lo, hi

    def cost_interval(self, s: int, a: int) -> tuple[float, float]:
        lo, hi = self.cost_intervals()
        return float(lo[s, a]), float(hi[s, a])

    def snapshot(self) -> ConfidenceSnapshot:
        cost_lower = self.cost_intervals()[0] if self.stochastic_costs else None
        p_hat = self.p_hat()
        radii = self.radii()
        counts = self.counts_sas.copy()
        for arr in (p_hat, radii, counts):
            arr.setflags(write=False)
        return ConfidenceSnapshot(p_hat=p_hat, radii=radii, mode=self.mode, counts=counts, cost_lower=cost_lower)
