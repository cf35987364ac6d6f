"""Pointwise statistics over repeated runs and the sublinearity verdict."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import PreconditionError
from ..types import RunRecord

log = logging.getLogger("ssplab.bench")


@dataclass
class AggregateSeries:
    algorithm: str
    v_star: float
    n_runs: int
    mean: np.ndarray
    min: np.ndarray
    max: np.ndarray
    stderr: np.ndarray

    @property
    def K(self) -> int:
        return int(self.mean.size)

    @property
    def normalized_mean(self) -> np.ndarray:
        """Δ̄(k) = Δ(k) / V*(s0)."""
        if self.v_star <= 0:
            return np.full_like(self.mean, np.nan)
        return self.mean / self.v_star

    @property
    def normalized_stderr(self) -> np.ndarray:
        if self.v_star <= 0:
            return np.full_like(self.stderr, np.nan)
        return self.stderr / self.v_star


@dataclass
class SublinearityVerdict:
    early_mean: float
    late_mean: float
    early_window: int
    late_window: int

    @property
    def sublinear(self) -> bool:
        return self.late_mean < self.early_mean

    @property
    def label(self) -> str:
        return "sublinear-consistent" if self.sublinear else "not-sublinear"


def aggregate_matrix(algorithm: str, regrets: np.ndarray, v_star: float) -> AggregateSeries:
    """Aggregate an (n_runs, K) matrix of cumulative regrets."""
    regrets = np.atleast_2d(np.asarray(regrets, dtype=float))
    n = regrets.shape[0]
    if n == 0:
        raise PreconditionError("cannot aggregate zero runs")
    if n > 1:
        stderr = regrets.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros(regrets.shape[1])
    return AggregateSeries(
        algorithm=algorithm,
        v_star=float(v_star),
        n_runs=n,
        mean=regrets.mean(axis=0),
        min=regrets.min(axis=0),
        max=regrets.max(axis=0),
        stderr=stderr,
    )


def aggregate(runs: Sequence[RunRecord]) -> AggregateSeries:
    """Pointwise mean, min, max and standard error of the cumulative regret across ``runs``."""
    if not runs:
        raise PreconditionError("cannot aggregate zero runs")
    Ks = {len(run.episodes) for run in runs}
    if len(Ks) != 1:
        raise PreconditionError(f"runs disagree on K: {sorted(Ks)}")
    algorithms = {run.algorithm for run in runs}
    if len(algorithms) != 1:
        raise PreconditionError(f"runs mix algorithms: {sorted(algorithms)}")
    ordered = sorted(runs, key=lambda run: run.seed)
    matrix = np.vstack([run.cumulative_regret() for run in ordered])
    series = aggregate_matrix(ordered[0].algorithm, matrix, ordered[0].v_star)
    log.debug(f"aggregate {series.algorithm}: {series.n_runs} runs, K={series.K}")
    return series


def sublinearity_check(series: np.ndarray | AggregateSeries, early_frac: float, late_frac: float) -> SublinearityVerdict:
    """
    Compare the mean per-episode regret over the first ``early_frac`` of the
    episodes with the mean over the last ``late_frac``. A constant slope gives
    equal means and a negative verdict.
    """
    for name, frac in (("early_frac", early_frac), ("late_frac", late_frac)):
        if not 0 < frac <= 0.5:
            raise PreconditionError(f"{name} must lie in (0, 0.5], got {frac}")
    cumulative = series.mean if isinstance(series, AggregateSeries) else np.asarray(series, dtype=float)
    if cumulative.size == 0:
        raise PreconditionError("empty regret series")
    increments = np.diff(cumulative, prepend=0.0)
    K = increments.size
    early = max(1, math.ceil(early_frac * K))
    late = max(1, math.ceil(late_frac * K))
    return SublinearityVerdict(
        early_mean=float(increments[:early].mean()),
        late_mean=float(increments[K - late:].mean()),
        early_window=early,
        late_window=late,
    )
