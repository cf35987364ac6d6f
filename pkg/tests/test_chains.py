import math

import numpy as np
import pytest

from core.environments import make_random_instance
from core.errors import ImproperPolicyError, InstanceError, PreconditionError, UnsupportedOrderError
from core.ssp import (
    AbsorbingChain,
    StationaryPolicy,
    chain_from_rows,
    chain_of,
    exact_value_iteration,
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

GEOMETRIC = AbsorbingChain(q=[[0.5]], r=[0.5])
ONE_STEP = AbsorbingChain(q=[[0.0]], r=[1.0])


def _random_chain(rng, n):
    inst = make_random_instance(n, 1, rng, goal_mass=0.1)
    return chain_of(inst, StationaryPolicy.constant(n, 0))


def test_chain_of_two_state_toy(toy):
    exit_chain = chain_of(toy, StationaryPolicy([1]))
    np.testing.assert_array_equal(exit_chain.q, [[0.0]])
    np.testing.assert_array_equal(exit_chain.r, [1.0])
    loop_chain = chain_of(toy, StationaryPolicy([0]))
    np.testing.assert_array_equal(loop_chain.q, [[1.0]])
    np.testing.assert_array_equal(loop_chain.r, [0.0])
    assert not is_proper(loop_chain)


def test_gridworld_optimal_chain_enters_goal_from_neighbours_only(uniform_grid):
    sol = exact_value_iteration(uniform_grid)
    chain = chain_of(uniform_grid, sol.policy)
    np.testing.assert_allclose(chain.q.sum(axis=1) + chain.r, 1.0)
    cells = [tuple(c) for c in uniform_grid.meta["cells"]]
    for s in np.flatnonzero(chain.r > 0):
        r, c = cells[s]
        assert abs(r - 2) + abs(c - 3) == 1


def test_chain_rejects_bad_rows():
    with pytest.raises(InstanceError):
        AbsorbingChain(q=[[0.5]], r=[0.4])
    with pytest.raises(InstanceError):
        chain_from_rows([[0.5, 0.5, 0.0]])


def test_geometric_tails():
    for n in range(6):
        assert hitting_tail(GEOMETRIC, 0, n) == pytest.approx(0.5**n)
    with pytest.raises(PreconditionError):
        hitting_tails(GEOMETRIC, -1)


def test_expected_hitting_times_chain(chain3):
    chain = chain_of(chain3, StationaryPolicy.constant(3, 0))
    np.testing.assert_allclose(expected_hitting_times(chain), [3.0, 2.0, 1.0])
    assert spectral_radius(chain) == pytest.approx(0.0)


def test_expected_hitting_time_geometric():
    assert expected_hitting_times(GEOMETRIC)[0] == pytest.approx(2.0)


def test_improper_chain_raises():
    with pytest.raises(ImproperPolicyError):
        expected_hitting_times(AbsorbingChain(q=[[1.0]], r=[0.0]))
    with pytest.raises(ImproperPolicyError):
        ph_factorial_moment(AbsorbingChain(q=[[1.0]], r=[0.0]), 0, 2)


def test_geometric_factorial_moments():
    assert ph_factorial_moment(GEOMETRIC, 0, 1) == pytest.approx(2.0)
    assert ph_factorial_moment(GEOMETRIC, 0, 2) == pytest.approx(4.0)
    # r! q^{r-1} / (1-q)^r
    for r in range(1, 7):
        expected = math.factorial(r) * 0.5 ** (r - 1) / 0.5**r
        assert ph_factorial_moment(GEOMETRIC, 0, r) == pytest.approx(expected)


def test_one_step_chain_has_zero_second_factorial_moment():
    assert ph_factorial_moment(ONE_STEP, 0, 2) == pytest.approx(0.0)
    assert ph_raw_moment(ONE_STEP, 0, 5) == pytest.approx(1.0)


def test_geometric_raw_moment():
    assert ph_raw_moment(GEOMETRIC, 0, 2) == pytest.approx(6.0)


def test_raw_moment_order_cap():
    with pytest.raises(UnsupportedOrderError):
        ph_raw_moment(GEOMETRIC, 0, 21)
    with pytest.raises(PreconditionError):
        ph_factorial_moments(GEOMETRIC, 0)


def test_first_raw_moment_is_expected_hitting_time(rng):
    chain = _random_chain(rng, 4)
    tau = expected_hitting_times(chain)
    for s in range(4):
        assert ph_raw_moment(chain, s, 1) == pytest.approx(tau[s])


def test_tails_match_monte_carlo(rng):
    for _ in range(5):
        chain = _random_chain(rng, 4)
        samples = simulate_hitting_times(chain, 0, 20_000, rng)
        for n in (1, 3, 6):
            p = hitting_tail(chain, 0, n)
            empirical = float((samples > n).mean())
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / samples.size)
            assert abs(empirical - p) <= 4 * sigma + 1e-9


def test_moments_match_monte_carlo_small(rng):
    chain = _random_chain(rng, 4)
    samples = simulate_hitting_times(chain, 0, 50_000, rng).astype(float)
    for r in (1, 2):
        exact = ph_raw_moment(chain, 0, r)
        stderr = (samples**r).std() / math.sqrt(samples.size)
        assert abs((samples**r).mean() - exact) <= 4 * stderr


@pytest.mark.slow
def test_moments_match_monte_carlo_million_samples():
    rng = np.random.default_rng(7)
    chain = _random_chain(rng, 4)
    samples = simulate_hitting_times(chain, 0, 1_000_000, rng).astype(float)
    for r in (1, 2, 3):
        exact = ph_raw_moment(chain, 0, r)
        assert (samples**r).mean() == pytest.approx(exact, rel=0.02)
        factorial = np.prod([samples - i for i in range(r)], axis=0).mean()
        assert factorial == pytest.approx(ph_factorial_moment(chain, 0, r), rel=0.02)


@pytest.mark.slow
def test_tails_match_monte_carlo_twenty_chains():
    rng = np.random.default_rng(11)
    outside = 0
    for _ in range(20):
        chain = _random_chain(rng, int(rng.integers(2, 7)))
        samples = simulate_hitting_times(chain, 0, 100_000, rng)
        for n in range(1, 10):
            p = hitting_tail(chain, 0, n)
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / samples.size)
            outside += abs(float((samples > n).mean()) - p) > 3 * sigma + 1e-9
    # 180 comparisons at 3 sigma: a couple of excursions are expected noise
    assert outside <= 3


def test_raw_moment_bound_on_random_chains(rng):
    for _ in range(100):
        chain = _random_chain(rng, int(rng.integers(2, 7)))
        lam = max(2.0, float(expected_hitting_times(chain).max()))
        for s in range(chain.n_states):
            for r in range(1, 9):
                assert ph_raw_moment(chain, s, r) <= 2.0 * (r * lam) ** r


def test_tails_are_monotone_and_sum_to_expected_time(rng):
    for _ in range(10):
        chain = _random_chain(rng, int(rng.integers(2, 7)))
        tails = np.array([hitting_tails(chain, n) for n in range(600)])
        assert (np.diff(tails, axis=0) <= 1e-15).all()
        np.testing.assert_allclose(tails.sum(axis=0), expected_hitting_times(chain), rtol=1e-9)
