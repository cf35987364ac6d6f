"""Confidence sets, extended value iteration and pivot horizons."""

from .confidence import (
    ConfidenceModel,
    ConfidenceSnapshot,
    bernstein_radii,
    cost_radius,
    l1_radii,
    radius_bernstein,
    radius_l1,
)
from .evi import Operator, PivotHorizon, PlanResult, evi_ssp, extended_q, inner_min, pivot_horizon

__all__ = [
    "bernstein_radii",
    "ConfidenceModel",
    "ConfidenceSnapshot",
    "cost_radius",
    "evi_ssp",
    "extended_q",
    "inner_min",
    "l1_radii",
    "Operator",
    "pivot_horizon",
    "PivotHorizon",
    "PlanResult",
    "radius_bernstein",
    "radius_l1",
]
