"""Shared datatypes for ssplab run traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class AttemptLog:
    k: int
    j: int
    start_time: int
    H: int
    start_state: int
    steps: int = 0
    cost: float = 0.0
    reached_goal: bool = False
    epsilon: float = 0.0
    gamma: float | None = None
    v_tilde_start: float = 0.0
    expected_tau_tilde: float = float("inf")
    expected_tau_hat: float = float("inf")
    plan_iterations: int = 0
    stopping_gap: float = 0.0
    horizon_capped: bool = False
    kernel_in_confidence: bool | None = None
    chain_rows: list[list[float]] | None = None


@dataclass
class EpisodeLog:
    k: int
    cost: float = 0.0
    length: int = 0
    phase1_steps: int = 0
    phase1_cost: float = 0.0
    phase2_steps: int = 0
    phase2_cost: float = 0.0
    n_phase2_attempts: int = 0
    H_k0: int = 0
    vtilde_s0: float = 0.0
    phase1_reached_goal: bool = True
    reset: bool = False


@dataclass
class EpochLog:
    index: int
    start_step: int
    episode: int
    sweeps: int
    residual: float
    tolerance: float
    horizon: int | None = None
    steps: int = 0
    converged: bool = True
    policy: list[int] = field(default_factory=list)


@dataclass
class Diagnostics:
    final_regret: float
    W_K: float
    Omega_K: int
    F_K: int
    G_K: int
    T_K1: int
    T_K2: int
    T_K: int
    decomposition_bound: float
    decomposition_holds: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "final_regret": self.final_regret,
            "W_K": self.W_K,
            "Omega_K": self.Omega_K,
            "F_K": self.F_K,
            "G_K": self.G_K,
            "T_K1": self.T_K1,
            "T_K2": self.T_K2,
            "T_K": self.T_K,
            "decomposition_bound": self.decomposition_bound,
            "decomposition_holds": self.decomposition_holds,
        }


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    K: int
    v_star: float
    c_max: float
    episodes: list[EpisodeLog] = field(default_factory=list)
    attempts: list[AttemptLog] = field(default_factory=list)
    epochs: list[EpochLog] = field(default_factory=list)
    diagnostics: Diagnostics | None = None
    penalty_J: float | None = None

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}:{self.seed}"

    def episode_costs(self) -> np.ndarray:
        return np.array([ep.cost for ep in self.episodes], dtype=float)

    def episode_lengths(self) -> np.ndarray:
        return np.array([ep.length for ep in self.episodes], dtype=np.int64)

    def cumulative_regret(self) -> np.ndarray:
        """Δ(k) = Σ_{i≤k} cost_i − k·V*(s0)."""
        costs = self.episode_costs()
        return np.cumsum(costs - self.v_star)

    def summary(self) -> dict[str, Any]:
        out: dict[str, Any] = {"algorithm": self.algorithm, "seed": self.seed, "K": self.K, "v_star": self.v_star}
        if self.diagnostics is not None:
            out.update(self.diagnostics.as_dict())
        else:
            regret = self.cumulative_regret()
            out["final_regret"] = float(regret[-1]) if regret.size else 0.0
            out["T_K"] = int(self.episode_lengths().sum())
        return out
