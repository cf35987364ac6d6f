"""Exception hierarchy shared by the ssplab modules."""

from __future__ import annotations


class SspError(RuntimeError):
    """Base class for every error raised by ssplab."""


class InstanceError(SspError):
    """Malformed SSP instance (shape mismatch, bad JSON, bad start index)."""


class PreconditionError(SspError):
    """An operation was called outside of its documented domain."""


class DivergenceError(SspError):
    """Value iteration did not reach its tolerance within the iteration budget."""

    def __init__(self, message: str, state: int, residual: float):
        super().__init__(f"{message} (worst state {state}, residual {residual:.3e})")
        self.state = state
        self.residual = residual


class NonContractionError(DivergenceError):
    """Extended value iteration exceeded its sweep cap."""


class ImproperPolicyError(SspError):
    """(I - Q) is singular: the policy does not reach the goal with probability 1."""


class UnsupportedOrderError(SspError):
    """Moment order outside of the exact Stirling-number range."""


class ConfidenceModeError(SspError):
    """A radius routine was called with a confidence mode it does not serve."""


class InfeasibleBoxError(SspError):
    """Per-element confidence box holds no probability vector."""


class CostDataError(SspError):
    """Observed cost outside of the declared [c_min, c_max] range."""


class EnvironmentStepError(SspError):
    """Environment was stepped from the goal or with an invalid action."""


class ConfigError(SspError):
    """Invalid experiment or runtime configuration."""
