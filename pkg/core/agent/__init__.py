"""UC-SSP learner, its variants and regret diagnostics."""

from .diagnostics import compute_diagnostics
from .ucssp import (
    AgentConfig,
    UcSspAgent,
    VARIANTS,
    eta_schedule,
    finite_penalty_horizon,
    run_ucssp,
    run_ucssp_finite_penalty,
    run_ucssp_perturbed,
)

__all__ = [
    "AgentConfig",
    "compute_diagnostics",
    "eta_schedule",
    "finite_penalty_horizon",
    "run_ucssp",
    "run_ucssp_finite_penalty",
    "run_ucssp_perturbed",
    "UcSspAgent",
    "VARIANTS",
]
