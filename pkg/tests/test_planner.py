import math

import numpy as np
import pytest

from core.environments import make_gridworld, make_two_state_toy
from core.errors import (
    ConfidenceModeError,
    CostDataError,
    InfeasibleBoxError,
    NonContractionError,
    PreconditionError,
)
from core.planner import (
    ConfidenceModel,
    Operator,
    evi_ssp,
    extended_q,
    inner_min,
    l1_radii,
    pivot_horizon,
    radius_bernstein,
    radius_l1,
)
from core.ssp import AbsorbingChain, exact_value_iteration


# ── radii ──


def test_theoretical_radius_at_first_visit():
    counts = np.zeros((11, 4))
    assert radius_l1(counts, 0, 0, "hoeffding_theoretical", 0.1) == pytest.approx(20.51, abs=0.01)


def test_experimental_radius_at_first_visit():
    counts = np.zeros((11, 4))
    expected = math.sqrt(12 * math.log(48 / 0.1))
    assert radius_l1(counts, 0, 0, "hoeffding_experimental", 0.1) == pytest.approx(expected)
    assert expected == pytest.approx(8.607, abs=0.01)


def test_theoretical_radius_decreases_with_visits():
    n = np.unique(np.logspace(np.log10(4), 6, 200).astype(int))
    radii = l1_radii(n, 12, 4, "hoeffding_theoretical", 0.1)
    assert (np.diff(radii) < 0).all()


def test_radius_l1_rejects_bernstein_mode():
    with pytest.raises(ConfidenceModeError):
        radius_l1(np.zeros((11, 4)), 0, 0, "bernstein", 0.1)


def test_bernstein_radius_formula():
    counts = np.zeros((11, 4, 12), dtype=np.int64)
    counts[0, 0, 0] = 50
    counts[0, 0, 11] = 50
    L = math.log(12 * 4 * 100 / 0.1)
    expected = math.sqrt(0.25 * L / 100) + L / 100
    assert radius_bernstein(counts, 0, 0, 0, 0.1) == pytest.approx(expected)
    # p̂ = 0: the variance term vanishes
    assert radius_bernstein(counts, 0, 0, 5, 0.1) == pytest.approx(L / 100)


def test_bernstein_radius_shrinks_with_visits():
    radii = []
    for n in (4, 40, 400, 4000, 40000):
        counts = np.zeros((2, 1, 3), dtype=np.int64)
        counts[0, 0, 0] = n // 4
        counts[0, 0, 2] = n - n // 4
        radii.append(radius_bernstein(counts, 0, 0, 0, 0.1))
    assert all(a > b for a, b in zip(radii, radii[1:]))


# ── inner minimization ──


def test_inner_min_wide_ball_puts_mass_on_argmin():
    p = inner_min(np.array([0.2, 0.3, 0.5]), 2.0, np.array([5.0, 1.0, 0.0]), "hoeffding_experimental")
    np.testing.assert_allclose(p, [0.0, 0.0, 1.0])


def test_inner_min_zero_radius_keeps_estimate():
    p_hat = np.array([0.2, 0.3, 0.5])
    p = inner_min(p_hat, 0.0, np.array([5.0, 1.0, 0.0]), "hoeffding_experimental")
    np.testing.assert_allclose(p, p_hat)


def test_inner_min_l1_example():
    v = np.array([0.0, 10.0])
    p = inner_min(np.array([0.5, 0.5]), 0.4, v, "hoeffding_experimental")
    np.testing.assert_allclose(p, [0.7, 0.3])
    assert p @ v == pytest.approx(3.0)


def test_inner_min_l1_matches_grid_search():
    p_hat = np.array([0.3, 0.5, 0.2])
    v = np.array([4.0, 1.0, 0.0])
    beta = 0.5
    a, b = np.meshgrid(np.arange(1001) / 1000, np.arange(1001) / 1000, indexing="ij")
    grid = np.stack([a, b, 1.0 - a - b], axis=-1)
    feasible = (grid[..., 2] >= -1e-12) & (np.abs(grid - p_hat).sum(axis=-1) <= beta + 1e-9)
    best = float((grid @ v)[feasible].min())
    p = inner_min(p_hat, beta, v, "hoeffding_experimental")
    assert p @ v == pytest.approx(best, abs=2e-3)
    assert np.abs(p - p_hat).sum() <= beta + 1e-12


def test_inner_min_bernstein_box():
    p_hat = np.array([0.5, 0.3, 0.2])
    radii = np.array([0.1, 0.1, 0.1])
    p = inner_min(p_hat, radii, np.array([3.0, 2.0, 0.0]), "bernstein")
    np.testing.assert_allclose(p, [0.4, 0.3, 0.3])
    assert p.sum() == pytest.approx(1.0)


def test_inner_min_infeasible_box():
    with pytest.raises(InfeasibleBoxError):
        inner_min(np.array([0.2, 0.2, 0.2]), np.zeros(3), np.zeros(3), "bernstein")


# ── pivot horizon ──


def test_pivot_horizon_all_mass_to_goal():
    assert pivot_horizon(np.zeros((3, 3)), 0.3).H == 2


def test_pivot_horizon_deterministic_chain():
    q = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    assert pivot_horizon(q, 0.5) == (4, False)


def test_pivot_horizon_geometric():
    H, capped = pivot_horizon(AbsorbingChain(q=[[0.5]], r=[0.5]), 0.1)
    assert (H, capped) == (5, False)
    assert H == 1 + math.ceil(math.log(0.1) / math.log(0.5))


def test_pivot_horizon_cap(caplog):
    result = pivot_horizon(np.array([[1.0]]), 0.5, h_max=10)
    assert result == (10, True)
    assert "capped" in caplog.text


def test_pivot_horizon_rejects_bad_gamma():
    with pytest.raises(PreconditionError):
        pivot_horizon(np.zeros((1, 1)), 0.0)
    with pytest.raises(PreconditionError):
        pivot_horizon(np.zeros((1, 1)), 1.5)


# ── extended value iteration ──


def test_evi_exact_model_chain(chain3, exact_snapshot):
    plan = evi_ssp(exact_snapshot(chain3), chain3.costs, 1e-6)
    np.testing.assert_allclose(plan.v_tilde, [3.0, 2.0, 1.0])
    assert plan.policy.as_list() == [0, 0, 0]


def test_evi_exact_model_toy_picks_exit(toy, exact_snapshot):
    plan = evi_ssp(exact_snapshot(toy), toy.costs, 1e-6, gamma=0.5)
    assert plan.policy(0) == 1
    assert plan.v_tilde[0] == pytest.approx(3.0)
    assert plan.pivot_horizon == 2
    assert plan.optimistic_hitting_time(0) == pytest.approx(1.0)


def test_evi_exact_model_is_optimistic(uniform_grid, exact_snapshot):
    eps = 1e-4
    plan = evi_ssp(exact_snapshot(uniform_grid), uniform_grid.costs, eps)
    v_star = exact_value_iteration(uniform_grid).values
    assert (plan.v_tilde <= v_star + eps).all()
    assert plan.v_tilde[uniform_grid.start] == pytest.approx(v_star[uniform_grid.start], abs=0.01)


def _learned_model(inst, n_steps, seed, mode="hoeffding_experimental"):
    rng = np.random.default_rng(seed)
    model = ConfidenceModel(inst.n_states, inst.n_actions, mode, 0.1)
    for _ in range(n_steps):
        s = int(rng.integers(inst.n_states))
        a = int(rng.integers(inst.n_actions))
        s_next = int(rng.choice(inst.n_states + 1, p=inst.kernel[s, a]))
        model.observe(s, a, s_next)
    model.absorb()
    return model


@pytest.mark.parametrize("mode", ["hoeffding_experimental", "hoeffding_theoretical", "bernstein"])
def test_evi_stopping_contract(uniform_grid, mode):
    model = _learned_model(uniform_grid, 3000, seed=5, mode=mode)
    eps = 1e-3
    plan = evi_ssp(model, uniform_grid.costs, eps, gamma=0.5)
    snapshot = model.snapshot()
    q, _ = extended_q(snapshot, uniform_grid.costs, plan.v_tilde)
    assert (q.min(axis=1) <= plan.v_tilde + eps + 1e-12).all()
    np.testing.assert_allclose(plan.p_tilde.sum(axis=1), 1.0)


def test_evi_optimism_when_kernel_is_plausible(uniform_grid):
    model = _learned_model(uniform_grid, 5000, seed=9)
    assert model.contains(uniform_grid.kernel)
    eps = 1e-3
    plan = evi_ssp(model, uniform_grid.costs, eps)
    v_star = exact_value_iteration(uniform_grid).value_at(uniform_grid.start)
    assert plan.v_tilde[uniform_grid.start] <= v_star + eps


def test_evi_pivot_horizon_semantics(uniform_grid):
    model = _learned_model(uniform_grid, 2000, seed=3)
    gamma = 0.2
    plan = evi_ssp(model, uniform_grid.costs, 1e-3, gamma=gamma)
    tails = plan.q_tilde.q
    v = np.ones(uniform_grid.n_states)
    for _ in range(plan.pivot_horizon - 1):
        v = tails @ v
    assert v.max() <= gamma + 1e-12


def test_evi_truncated_operator_caps_values(uniform_grid):
    model = _learned_model(uniform_grid, 200, seed=1)
    plan = evi_ssp(model, uniform_grid.costs, 1e-3, Operator.truncated(2.0), horizon=7)
    assert plan.v_tilde.max() <= 2.0
    assert plan.pivot_horizon == 7


def test_evi_perturbed_operator_handles_zero_costs():
    inst = make_gridworld(scenario="zero_region")
    model = _learned_model(inst, 500, seed=2)
    plan = evi_ssp(model, inst.costs, 1e-3, Operator.perturbed(0.5), gamma=0.5)
    assert np.isfinite(plan.v_tilde).all()
    with pytest.raises(PreconditionError):
        evi_ssp(model, inst.costs, 1e-3)


def test_evi_sweep_cap(chain3, exact_snapshot):
    with pytest.raises(NonContractionError):
        evi_ssp(exact_snapshot(chain3), chain3.costs, 1e-6, max_sweeps=1)


def test_evi_rejects_bad_inputs(toy, exact_snapshot):
    with pytest.raises(PreconditionError):
        evi_ssp(exact_snapshot(toy), toy.costs, 0.0)
    with pytest.raises(PreconditionError):
        evi_ssp(exact_snapshot(toy), np.ones((2, 2)), 0.1)
    with pytest.raises(PreconditionError):
        Operator.truncated(0.0)
    with pytest.raises(PreconditionError):
        Operator.perturbed(-1.0)


# ── confidence model ──


def test_counts_fold_only_on_absorb():
    model = ConfidenceModel(2, 1)
    model.observe(0, 0, 2)
    assert model.counts[0, 0] == 0
    assert model.pending[0, 0] == 1
    assert model.absorb() == 1
    assert model.counts[0, 0] == 1
    assert model.pending.sum() == 0
    np.testing.assert_allclose(model.p_hat()[0, 0], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(model.p_hat()[1, 0], [1 / 3, 1 / 3, 1 / 3])


def test_unknown_mode_rejected():
    with pytest.raises(ConfidenceModeError):
        ConfidenceModel(2, 1, mode="kl")


def test_cost_interval_unvisited_is_full_range():
    model = ConfidenceModel(1, 1, c_min=0.0, c_max=1.0, stochastic_costs=True)
    assert model.cost_interval(0, 0) == (0.0, 1.0)


def test_cost_interval_after_many_observations():
    model = ConfidenceModel(1, 1, c_min=0.0, c_max=1.0, stochastic_costs=True)
    model.update_cost_bounds(0, 0, 0.4)
    model.cost_sum[0, 0] = 0.4 * 1_000_000
    model.cost_count[0, 0] = 1_000_000
    lo, hi = model.cost_interval(0, 0)
    assert model.cost_hat()[0, 0] == pytest.approx(0.4)
    assert hi - lo < 0.02
    assert lo <= 0.4 <= hi


def test_cost_bounds_reject_out_of_range():
    model = ConfidenceModel(1, 1, c_min=0.0, c_max=1.0, stochastic_costs=True)
    with pytest.raises(CostDataError):
        model.update_cost_bounds(0, 0, 1.5)
    known = ConfidenceModel(1, 1)
    with pytest.raises(PreconditionError):
        known.update_cost_bounds(0, 0, 0.5)


def test_snapshot_is_read_only():
    model = ConfidenceModel(2, 2)
    snap = model.snapshot()
    with pytest.raises(ValueError):
        snap.p_hat[0, 0, 0] = 1.0
    model.observe(0, 0, 0)
    model.absorb()
    assert snap.counts.sum() == 0


def test_toy_plan_with_stochastic_cost_bounds():
    inst = make_two_state_toy(1.0, 3.0)
    model = ConfidenceModel(1, 2, c_min=1.0, c_max=3.0, stochastic_costs=True)
    lower = model.cost_intervals()[0]
    np.testing.assert_allclose(lower, [[1.0, 1.0]])
    plan = evi_ssp(model, lower, 0.1, gamma=1.0)
    assert plan.v_tilde[0] == pytest.approx(1.0)
    assert plan.policy(0) == 0
    assert plan.p_tilde.shape == (inst.n_states, inst.n_states + 1)


def test_empirical_hitting_time_matches_optimistic_on_exact_model(uniform_grid, exact_snapshot):
    plan = evi_ssp(exact_snapshot(uniform_grid), uniform_grid.costs, 1e-8, gamma=0.5)
    s = uniform_grid.start
    assert plan.empirical_hitting_time(s) == pytest.approx(plan.optimistic_hitting_time(s))


def test_empirical_hitting_time_of_unvisited_model():
    model = ConfidenceModel(3, 2)
    plan = evi_ssp(model, np.ones((3, 2)), 1e-3)
    # uniform p̂ over 3 states plus the goal
    assert plan.empirical_hitting_time(0) == pytest.approx(4.0)


@pytest.mark.parametrize("mode", ["hoeffding_experimental", "bernstein"])
def test_evi_iterates_are_non_decreasing(uniform_grid, mode):
    snapshot = _learned_model(uniform_grid, 1500, seed=11, mode=mode).snapshot()
    v = np.zeros(uniform_grid.n_states)
    for _ in range(200):
        q, _ = extended_q(snapshot, uniform_grid.costs, v)
        v_next = q.min(axis=1)
        assert (v_next >= v - 1e-12).all()
        v = v_next
