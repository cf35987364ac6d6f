"""SSP data model, exact oracles and absorbing-chain analytics."""

from .chains import (
    AbsorbingChain,
    chain_from_rows,
    chain_of,
    expected_hitting_times,
    hitting_tail,
    hitting_tails,
    is_proper,
    ph_factorial_moment,
    ph_factorial_moments,
    ph_raw_moment,
    simulate_hitting_times,
    spectral_radius,
)
from .model import SspInstance, StationaryPolicy
from .planning import (
    Solution,
    almost_sure_reachable,
    evaluate_policy,
    exact_value_iteration,
    greedy_policy,
    min_hitting_time_policy,
    optimal_value,
    proper_value_iteration,
    q_values,
    ssp_diameter,
    truncated_proper_value_iteration,
    truncated_value_iteration,
    winning_value_iteration,
)
from .validation import ValidationReport, validate_instance

__all__ = [
    "AbsorbingChain",
    "almost_sure_reachable",
    "chain_from_rows",
    "chain_of",
    "evaluate_policy",
    "exact_value_iteration",
    "expected_hitting_times",
    "greedy_policy",
    "hitting_tail",
    "hitting_tails",
    "is_proper",
    "min_hitting_time_policy",
    "optimal_value",
    "ph_factorial_moment",
    "ph_factorial_moments",
    "ph_raw_moment",
    "proper_value_iteration",
    "q_values",
    "simulate_hitting_times",
    "Solution",
    "spectral_radius",
    "ssp_diameter",
    "SspInstance",
    "StationaryPolicy",
    "truncated_proper_value_iteration",
    "truncated_value_iteration",
    "ValidationReport",
    "validate_instance",
    "winning_value_iteration",
]
