"""Shared constants used across ssplab."""

from __future__ import annotations

from pathlib import Path

# Project root for resolving runtime-relative paths reliably.
PROJECT_ROOT = Path(__file__).resolve().parent.parent

# Row-sum slack for kernels and absorbing chains.
PROB_TOL = 1e-12

# Exact value iteration (oracle) defaults.
VI_TOL = 1e-10
VI_MAX_ITER = 1_000_000

# Values above this are treated as "goal unreachable" when computing the diameter.
DIVERGENCE_BOUND = 1e9

# Extended value iteration sweep cap and pivot-horizon cap.
EVI_MAX_SWEEPS = 10_000_000
H_MAX = 1_000_000

# UCRL2 extended VI (span stopping) sweep cap.
UCRL2_MAX_SWEEPS = 10_000

# Perturbation used by the best-proper-policy oracle.
PROPER_ORACLE_ETA = 1e-10

# Largest moment order with exact Stirling numbers.
MAX_MOMENT_ORDER = 20

DEFAULT_DELTA = 0.1

VERSION = "0.1.0"

CONFIDENCE_MODES = (
    "hoeffding_theoretical",
    "hoeffding_experimental",
    "bernstein",
)
L1_MODES = ("hoeffding_theoretical", "hoeffding_experimental")

ALGORITHMS = (
    "ucssp",
    "ucssp_J",
    "ucssp_eta",
    "ucssp_J_eta",
    "ucrl2",
    "ucrl_ssp",
    "ucrl_ssp_pivot",
)

RUN_CSV_COLUMNS = (
    "k",
    "episode_cost",
    "episode_len",
    "phase1_steps",
    "phase2_steps",
    "n_phase2_attempts",
    "H_k0",
    "vtilde_s0",
    "cum_regret",
)

ATTEMPT_CSV_COLUMNS = (
    "k",
    "j",
    "H",
    "steps",
    "reached_goal",
    "start_state",
    "expected_tau_tilde",
    "expected_tau_hat",
)
