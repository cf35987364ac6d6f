"""Infinite-horizon baselines and the doubling-epoch SSP planner."""

from .epochs import BaselineConfig, DoublingEpochLearner, EpochPlan, PLANNING_MODES
from .m_infinity import (
    MInfinity,
    average_cost,
    build_m_infinity,
    long_run_average,
    m_infinity_diameter,
    stationary_gain,
)
from .ucrl2 import Ucrl2Learner, extended_value_iteration_gain, run_ucrl2
from .ucrl_ssp import UcrlSspLearner, floor_costs, run_ucrl_ssp_style, two_step_kernel

__all__ = [
    "average_cost",
    "BaselineConfig",
    "build_m_infinity",
    "DoublingEpochLearner",
    "EpochPlan",
    "extended_value_iteration_gain",
    "floor_costs",
    "long_run_average",
    "m_infinity_diameter",
    "MInfinity",
    "PLANNING_MODES",
    "run_ucrl2",
    "run_ucrl_ssp_style",
    "stationary_gain",
    "two_step_kernel",
    "Ucrl2Learner",
    "UcrlSspLearner",
]
