"""
Constructors for the concrete SSP instances used by the lab.

Every builder returns a validated-by-construction ``SspInstance`` whose goal is
the implicit last column of the kernel.
"""

from __future__ import annotations

import numpy as np

from ..errors import PreconditionError
from ..ssp.model import SspInstance

# Right, Down, Left, Up as (d_row, d_col); row 0 is the top row.
GRID_ACTIONS: tuple[tuple[int, int], ...] = ((0, 1), (1, 0), (0, -1), (-1, 0))
GRID_ACTION_NAMES = ("right", "down", "left", "up")

GRID_SCENARIOS = ("uniform", "sandpit", "zero_region")
DEFAULT_BETA = {"sandpit": 0.5, "zero_region": 0.4}
SANDPIT_CELL = (1, 1)
ZERO_REGION_CELLS = ((0, 0), (0, 1), (1, 1), (1, 0))


# ── Gridworld ───────────────────────────────────────────────


def _grid_costs(cells: list[tuple[int, int]], scenario: str, beta: float | None) -> tuple[np.ndarray, float]:
    if scenario == "uniform":
        return np.ones(len(cells)), 1.0
    if beta is None:
        beta = DEFAULT_BETA[scenario]
    if beta <= 0:
        raise PreconditionError(f"{scenario} cost level must be positive, got {beta}")
    if scenario == "sandpit":
        per_cell = [1.0 if cell == SANDPIT_CELL else beta for cell in cells]
    else:
        per_cell = [0.0 if cell in ZERO_REGION_CELLS else beta for cell in cells]
    return np.asarray(per_cell, dtype=float), float(beta)


def make_gridworld(
    rows: int = 3,
    cols: int = 4,
    p_f: float = 0.05,
    scenario: str = "uniform",
    beta: float | None = None,
    start: tuple[int, int] = (0, 0),
    goal: tuple[int, int] | None = None,
) -> SspInstance:
    """
    Slippery gridworld with four cardinal actions.

    A move into a wall keeps the agent in place with probability 1. Otherwise the
    intended direction has probability 1 - p_f and each other direction p_f/3,
    with blocked directions folded into staying put.
    """
    if scenario not in GRID_SCENARIOS:
        raise PreconditionError(f"unknown gridworld scenario {scenario!r}; expected one of {GRID_SCENARIOS}")
    if not 0.0 <= p_f < 1.0:
        raise PreconditionError(f"failure probability must lie in [0, 1), got {p_f}")
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise PreconditionError(f"grid {rows}x{cols} has no room for a start and a goal")
    goal = (rows - 1, cols - 1) if goal is None else tuple(goal)
    start = tuple(start)
    for name, cell in (("start", start), ("goal", goal)):
        if not (0 <= cell[0] < rows and 0 <= cell[1] < cols):
            raise PreconditionError(f"{name} cell {cell} is outside the {rows}x{cols} grid")
    if start == goal:
        raise PreconditionError("start and goal cells coincide")

    cells = [(r, c) for r in range(rows) for c in range(cols) if (r, c) != goal]
    index = {cell: i for i, cell in enumerate(cells)}
    n_states = len(cells)
    goal_col = n_states

    def target(cell: tuple[int, int], move: tuple[int, int]) -> tuple[int, int] | None:
        r, c = cell[0] + move[0], cell[1] + move[1]
        if 0 <= r < rows and 0 <= c < cols:
            return (r, c)
        return None

    def column(cell: tuple[int, int]) -> int:
        return goal_col if cell == goal else index[cell]

    kernel = np.zeros((n_states, len(GRID_ACTIONS), n_states + 1))
    for s, cell in enumerate(cells):
        for a, move in enumerate(GRID_ACTIONS):
            intended = target(cell, move)
            if intended is None:
                kernel[s, a, s] = 1.0
                continue
            kernel[s, a, column(intended)] += 1.0 - p_f
            for b, other in enumerate(GRID_ACTIONS):
                if b == a:
                    continue
                slip = target(cell, other)
                kernel[s, a, s if slip is None else column(slip)] += p_f / 3.0

    per_state, level = _grid_costs(cells, scenario, beta)
    costs = np.repeat(per_state[:, None], len(GRID_ACTIONS), axis=1)
    if scenario == "uniform":
        c_min, c_max = 1.0, 1.0
    else:
        c_min, c_max = float(per_state.min()), float(per_state.max())
    name = f"gridworld-{scenario}" if scenario == "uniform" else f"gridworld-{scenario}-{level:g}"
    return SspInstance(
        kernel=kernel,
        costs=costs,
        start=index[start],
        c_min=c_min,
        c_max=c_max,
        name=name,
        meta={
            "rows": rows,
            "cols": cols,
            "p_f": p_f,
            "scenario": scenario,
            "beta": None if scenario == "uniform" else level,
            "start_cell": list(start),
            "goal_cell": list(goal),
            "cells": [list(cell) for cell in cells],
            "actions": list(GRID_ACTION_NAMES),
        },
    )


# ── Toys ────────────────────────────────────────────────────


def make_two_state_toy(c_min: float = 1.0, c_max: float = 3.0) -> SspInstance:
    """s0 with a1 (self-loop, cost c_min) and a2 (to the goal, cost c_max)."""
    if not 0 < c_min <= c_max:
        raise PreconditionError(f"need 0 < c_min <= c_max, got ({c_min}, {c_max})")
    kernel = np.zeros((1, 2, 2))
    kernel[0, 0, 0] = 1.0
    kernel[0, 1, 1] = 1.0
    return SspInstance(
        kernel=kernel,
        costs=np.array([[c_min, c_max]]),
        start=0,
        c_min=c_min,
        c_max=c_max,
        name="toy-fig1",
        meta={"actions": ["a1", "a2"]},
    )


def make_dead_end_toy(c_min: float = 1.0, c_max: float = 3.0) -> SspInstance:
    """Two-state toy plus a3, which moves to an absorbing non-goal dead-end d."""
    if not 0 < c_min <= c_max:
        raise PreconditionError(f"need 0 < c_min <= c_max, got ({c_min}, {c_max})")
    kernel = np.zeros((2, 3, 3))
    kernel[0, 0, 0] = 1.0
    kernel[0, 1, 2] = 1.0
    kernel[0, 2, 1] = 1.0
    kernel[1, :, 1] = 1.0
    costs = np.full((2, 3), c_min)
    costs[0, 1] = c_max
    return SspInstance(
        kernel=kernel,
        costs=costs,
        start=0,
        c_min=c_min,
        c_max=c_max,
        name="toy-fig1-deadend",
        meta={"actions": ["a1", "a2", "a3"], "dead_end_state": 1, "dead_end_action": 2},
    )


def make_offset_example(eta: float = 1.0) -> SspInstance:
    """
    Direct edge s0 -> goal at cost 4η (action 0) against the path
    s0 -> s1 -> s2 -> goal at η per step (action 0 then anything).

    Raw costs favour the path (3η < 4η); adding η to every cost favours the
    direct edge (5η < 6η).
    """
    if eta <= 0:
        raise PreconditionError(f"eta must be positive, got {eta}")
    kernel = np.zeros((3, 2, 4))
    kernel[0, 0, 3] = 1.0
    kernel[0, 1, 1] = 1.0
    kernel[1, :, 2] = 1.0
    kernel[2, :, 3] = 1.0
    costs = np.full((3, 2), eta)
    costs[0, 0] = 4.0 * eta
    return SspInstance(
        kernel=kernel,
        costs=costs,
        start=0,
        c_min=eta,
        c_max=4.0 * eta,
        name="toy-offset",
        meta={"eta": eta, "direct_action": 0, "path_action": 1},
    )


def make_sspcom_toy() -> SspInstance:
    """s0: a00 self-loop, a01 to the goal; s1: both actions to s0. Uniform costs, D = 2."""
    kernel = np.zeros((2, 2, 3))
    kernel[0, 0, 0] = 1.0
    kernel[0, 1, 2] = 1.0
    kernel[1, :, 0] = 1.0
    return SspInstance(
        kernel=kernel,
        costs=np.ones((2, 2)),
        start=0,
        c_min=1.0,
        c_max=1.0,
        name="toy-sspcom",
        meta={"actions": ["a00", "a01"]},
    )


def make_chain(n: int = 3, cost: float = 1.0) -> SspInstance:
    """Deterministic single-action chain 0 -> 1 -> ... -> n-1 -> goal."""
    if n < 1:
        raise PreconditionError(f"chain needs at least one state, got {n}")
    if cost <= 0:
        raise PreconditionError(f"chain cost must be positive, got {cost}")
    kernel = np.zeros((n, 1, n + 1))
    for s in range(n):
        kernel[s, 0, s + 1] = 1.0
    return SspInstance(
        kernel=kernel,
        costs=np.full((n, 1), float(cost)),
        start=0,
        c_min=float(cost),
        c_max=float(cost),
        name=f"chain-{n}",
    )


def make_random_instance(
    n_states: int,
    n_actions: int,
    rng: np.random.Generator,
    goal_mass: float = 0.05,
    cost_range: tuple[float, float] = (0.1, 1.0),
) -> SspInstance:
    """Dense random SSP whose every row puts at least ``goal_mass`` on the goal."""
    if not 0 < goal_mass <= 1:
        raise PreconditionError(f"goal mass must lie in (0, 1], got {goal_mass}")
    rows = rng.dirichlet(np.ones(n_states + 1), size=(n_states, n_actions))
    rows *= 1.0 - goal_mass
    rows[:, :, n_states] += goal_mass
    lo, hi = cost_range
    costs = rng.uniform(lo, hi, size=(n_states, n_actions))
    return SspInstance(
        kernel=rows,
        costs=costs,
        start=0,
        c_min=lo,
        c_max=hi,
        name=f"random-{n_states}x{n_actions}",
    )
