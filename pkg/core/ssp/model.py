"""
SSP instance data model.

A finite SSP is stored over its non-goal states only. The goal is the implicit
column ``n_states`` of every kernel row: it is absorbing and cost-free and has
no row of its own, so those two properties cannot be violated by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import InstanceError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SspInstance:
    """Finite SSP: kernel p(s'|s,a) over S ∪ {goal}, costs c(s,a), start state."""

    kernel: np.ndarray
    costs: np.ndarray
    start: int = 0
    c_min: float = 0.0
    c_max: float = 1.0
    name: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kernel = _frozen(self.kernel)
        costs = _frozen(self.costs)
        if kernel.ndim != 3:
            raise InstanceError(f"kernel must be (S, A, S+1), got shape {kernel.shape}")
        n_states, n_actions, width = kernel.shape
        if n_states < 1 or n_actions < 1:
            raise InstanceError("instance needs at least one non-goal state and one action")
        if width != n_states + 1:
            raise InstanceError(
                f"kernel rows must cover {n_states} states plus the goal, got width {width}"
            )
        if costs.shape != (n_states, n_actions):
            raise InstanceError(
                f"costs must be ({n_states}, {n_actions}), got shape {costs.shape}"
            )
        if not 0 <= int(self.start) < n_states:
            raise InstanceError(f"start {self.start} is not a non-goal state index")
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "c_min", float(self.c_min))
        object.__setattr__(self, "c_max", float(self.c_max))

    @property
    def n_states(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.kernel.shape[1])

    @property
    def goal(self) -> int:
        """Column index of the goal in every kernel row."""
        return self.n_states

    def with_costs(
        self,
        costs: np.ndarray,
        c_min: float | None = None,
        c_max: float | None = None,
        name: str | None = None,
    ) -> "SspInstance":
        costs = np.asarray(costs, dtype=float)
        return SspInstance(
            kernel=self.kernel,
            costs=costs,
            start=self.start,
            c_min=float(costs.min()) if c_min is None else c_min,
            c_max=float(costs.max()) if c_max is None else c_max,
            name=self.name if name is None else name,
            meta=dict(self.meta),
        )

    def drop_action(self, action: int) -> "SspInstance":
        """Remove one action from every state."""
        if not 0 <= action < self.n_actions or self.n_actions == 1:
            raise InstanceError(f"cannot drop action {action} of {self.n_actions}")
        keep = [a for a in range(self.n_actions) if a != action]
        return SspInstance(
            kernel=self.kernel[:, keep, :],
            costs=self.costs[:, keep],
            start=self.start,
            c_min=self.c_min,
            c_max=self.c_max,
            name=f"{self.name}-without-a{action}" if self.name else "",
            meta=dict(self.meta),
        )

    def with_reset_action(self, penalty: float) -> "SspInstance":
        """Append an action that jumps to the goal with probability 1 at cost ``penalty``."""
        reset_rows = np.zeros((self.n_states, 1, self.n_states + 1))
        reset_rows[:, 0, self.goal] = 1.0
        reset_costs = np.full((self.n_states, 1), float(penalty))
        meta = dict(self.meta)
        meta["reset_action"] = self.n_actions
        return SspInstance(
            kernel=np.concatenate([self.kernel, reset_rows], axis=1),
            costs=np.concatenate([self.costs, reset_costs], axis=1),
            start=self.start,
            c_min=min(self.c_min, float(penalty)),
            c_max=max(self.c_max, float(penalty)),
            name=f"{self.name}+reset" if self.name else "reset",
            meta=meta,
        )

    # ── JSON ──────────────────────────────────────────────────

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "n_states": self.n_states,
            "n_actions": self.n_actions,
            "start": self.start,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "costs": self.costs.tolist(),
            "kernel": self.kernel.tolist(),
        }
        if self.name:
            data["name"] = self.name
        if self.meta:
            data["meta"] = self.meta
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SspInstance":
        try:
            inst = cls(
                kernel=np.asarray(data["kernel"], dtype=float),
                costs=np.asarray(data["costs"], dtype=float),
                start=int(data["start"]),
                c_min=float(data["c_min"]),
                c_max=float(data["c_max"]),
                name=str(data.get("name", "")),
                meta=dict(data.get("meta", {})),
            )
        except KeyError as e:
            raise InstanceError(f"instance JSON is missing field {e}") from e
        declared = (int(data.get("n_states", inst.n_states)), int(data.get("n_actions", inst.n_actions)))
        if declared != (inst.n_states, inst.n_actions):
            raise InstanceError(
                f"declared dimensions {declared} do not match arrays "
                f"({inst.n_states}, {inst.n_actions})"
            )
        return inst

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "SspInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InstanceError(f"invalid instance JSON: {e}") from e
        return cls.from_dict(data)

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.to_json(indent=2), encoding="utf-8")
        return target

    @classmethod
    def load(cls, path: str | Path) -> "SspInstance":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True, eq=False)
class StationaryPolicy:
    """Deterministic stationary policy: one action per non-goal state."""

    actions: np.ndarray

    def __post_init__(self):
        actions = np.array(self.actions, dtype=np.int64, copy=True).reshape(-1)
        if actions.size and actions.min() < 0:
            raise InstanceError("policy actions must be nonnegative")
        actions.setflags(write=False)
        object.__setattr__(self, "actions", actions)

    def __call__(self, state: int) -> int:
        return int(self.actions[state])

    def __len__(self) -> int:
        return int(self.actions.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StationaryPolicy):
            return NotImplemented
        return bool(np.array_equal(self.actions, other.actions))

    def __hash__(self) -> int:
        return hash(tuple(self.actions.tolist()))

    @classmethod
    def constant(cls, n_states: int, action: int) -> "StationaryPolicy":
        return cls(np.full(n_states, action, dtype=np.int64))

    def check(self, inst: SspInstance) -> None:
        if len(self) != inst.n_states:
            raise InstanceError(f"policy covers {len(self)} states, instance has {inst.n_states}")
        if self.actions.size and self.actions.max() >= inst.n_actions:
            raise InstanceError(f"policy uses action {int(self.actions.max())} of {inst.n_actions}")

    def as_list(self) -> list[int]:
        return [int(a) for a in self.actions]
