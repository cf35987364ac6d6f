"""Report-style instance validation: invariant violations plus the SSP-diameter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..constants import PROB_TOL, VI_MAX_ITER, VI_TOL
from .model import SspInstance
from .planning import almost_sure_reachable, ssp_diameter


@dataclass
class ValidationReport:
    row_sum_violations: list[tuple[int, int, float]] = field(default_factory=list)
    negative_entries: list[tuple[int, int]] = field(default_factory=list)
    cost_violations: list[tuple[int, int, float]] = field(default_factory=list)
    bound_violations: list[str] = field(default_factory=list)
    unreachable_states: list[int] = field(default_factory=list)
    ssp_diameter: float = math.inf

    @property
    def ssp_communicating(self) -> bool:
        return math.isfinite(self.ssp_diameter)

    @property
    def ok(self) -> bool:
        """True when no invariant is violated (communication is reported separately)."""
        return not (
            self.row_sum_violations
            or self.negative_entries
            or self.cost_violations
            or self.bound_violations
        )

    def summary(self) -> str:
        parts = [
            f"rows={len(self.row_sum_violations)}",
            f"negative={len(self.negative_entries)}",
            f"costs={len(self.cost_violations)}",
            f"bounds={len(self.bound_violations)}",
            f"D={self.ssp_diameter:.6g}",
        ]
        return ", ".join(parts)


def validate_instance(
    inst: SspInstance,
    tol: float = VI_TOL,
    max_iter: int = VI_MAX_ITER,
) -> ValidationReport:
    report = ValidationReport()

    sums = inst.kernel.sum(axis=2)
    for s, a in zip(*np.nonzero(np.abs(sums - 1.0) > PROB_TOL)):
        report.row_sum_violations.append((int(s), int(a), float(sums[s, a])))
    for s, a in zip(*np.nonzero((inst.kernel < 0).any(axis=2))):
        report.negative_entries.append((int(s), int(a)))

    if inst.c_min < 0:
        report.bound_violations.append(f"c_min {inst.c_min} is negative")
    if inst.c_min > inst.c_max:
        report.bound_violations.append(f"c_min {inst.c_min} exceeds c_max {inst.c_max}")
    outside = (inst.costs < inst.c_min) | (inst.costs > inst.c_max) | ~np.isfinite(inst.costs)
    for s, a in zip(*np.nonzero(outside)):
        report.cost_violations.append((int(s), int(a), float(inst.costs[s, a])))

    win, _ = almost_sure_reachable(inst)
    report.unreachable_states = [int(s) for s in np.flatnonzero(~win)]
    if win.all():
        report.ssp_diameter = ssp_diameter(inst, tol=tol, max_iter=max_iter)
    return report
