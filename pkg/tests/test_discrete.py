import math

import pytest

from fairsub.discrete import (
    beta_for_epsilon,
    greedy_bi,
    greedy_fairness_bi,
    threshold_fairness_bi,
)
from fairsub.errors import InfeasibleThresholdError
from fairsub.matroid import FairnessMatroid, beta_extension, is_member
from fairsub.model import PartitionedUniverse, as_fraction
from fairsub.oracles import CountingOracle, TagCoverOracle
from fairsub.rng import make_rng

from bruteforce import fsm_opt, subset_values
from instances import random_matroid, random_tagged_universe


def test_beta_for_epsilon_is_exact():
    assert beta_for_epsilon(0.5) == 2
    assert beta_for_epsilon(0.1) == 10  # would be 11 under float 1/0.1
    assert beta_for_epsilon(1) == 1
    assert beta_for_epsilon(0.3) == 4
    with pytest.raises(ValueError):
        beta_for_epsilon(0)


# ---------------------------------------------------------------------------
# greedy_bi


def test_greedy_bi_t1(t1_universe, t1_oracle):
    s = greedy_bi(t1_oracle, t1_universe, tau=4, epsilon=0.25)
    assert s.members == {1, 3}
    s = greedy_bi(t1_oracle, t1_universe, tau=2, epsilon=0.5)
    assert s.members == {1}


def test_greedy_bi_zero_threshold(t1_universe, t1_oracle):
    assert len(greedy_bi(t1_oracle, t1_universe, tau=0, epsilon=0.25)) == 0


def test_greedy_bi_infeasible(t1_universe, t1_oracle):
    with pytest.raises(InfeasibleThresholdError):
        greedy_bi(t1_oracle, t1_universe, tau=9, epsilon=0.1)


def test_greedy_bi_exceeds_bar_and_matches_naive():
    rng = make_rng(41, 0)
    for _ in range(40):
        universe, oracle = random_tagged_universe(rng)
        full = oracle.evaluate(universe.elements())
        if full == 0:
            continue
        tau = int(rng.integers(1, full + 1))
        eps = [0.25, 0.5][int(rng.integers(0, 2))]
        fast = greedy_bi(oracle, universe, tau, eps, lazy=True)
        slow = greedy_bi(oracle, universe, tau, eps, lazy=False)
        assert fast.members == slow.members
        assert oracle.evaluate(fast) > (1 - as_fraction(eps)) * tau


# ---------------------------------------------------------------------------
# greedy_fairness_bi


def test_greedy_fairness_bi_t1_half(t1_universe, t1_oracle):
    m = FairnessMatroid(t1_universe, 2, (0, 0), (2, 2))
    res = greedy_fairness_bi(t1_oracle, m, 0.5)
    assert res.beta_used == 2
    assert res.solution.members == {0, 1, 2, 3}
    assert t1_oracle.evaluate(res.solution) == 4
    assert len(res.solution) == 4  # the scaled budget


def test_greedy_fairness_bi_t1_beta_one(t1_universe, t1_oracle):
    m = FairnessMatroid(t1_universe, 1, (0, 0), (1, 1))
    res = greedy_fairness_bi(t1_oracle, m, 1)
    assert res.solution.members == {1}


def test_greedy_fairness_output_in_scaled_matroid_and_approximation():
    rng = make_rng(42, 0)
    for _ in range(60):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        values = subset_values(oracle, universe.n)
        for eps in (0.25, 0.5):
            res = greedy_fairness_bi(oracle, matroid, eps)
            scaled = beta_extension(matroid, res.beta_used)
            assert is_member(scaled, res.solution)
            opt = fsm_opt(matroid, values)
            assert oracle.evaluate(res.solution) >= (1 - as_fraction(eps)) * opt


def test_greedy_fairness_lazy_equals_naive():
    rng = make_rng(43, 0)
    for _ in range(40):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        eps = [0.25, 0.5, 1][int(rng.integers(0, 3))]
        fast = greedy_fairness_bi(oracle, matroid, eps, lazy=True)
        slow = greedy_fairness_bi(oracle, matroid, eps, lazy=False)
        assert fast.solution.members == slow.solution.members


def test_greedy_fairness_query_budget():
    rng = make_rng(44, 0)
    for _ in range(30):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        eps = [0.25, 0.5][int(rng.integers(0, 2))]
        counter = CountingOracle(oracle)
        res = greedy_fairness_bi(counter, matroid, eps)
        budget = universe.n * res.beta_used * matroid.kappa
        assert res.queries <= budget
        assert counter.marginal_queries == res.queries


def test_greedy_fairness_per_color_bounds():
    rng = make_rng(45, 0)
    for _ in range(40):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        res = greedy_fairness_bi(oracle, matroid, 0.5)
        beta = res.beta_used
        counts = res.solution.counts
        assert all(c <= beta * u for c, u in zip(counts, matroid.upper))
        assert sum(
            max(c, beta * l) for c, l in zip(counts, matroid.lower)
        ) <= beta * matroid.kappa


# ---------------------------------------------------------------------------
# threshold_fairness_bi


def test_threshold_fairness_t1(t1_universe, t1_oracle):
    m = FairnessMatroid(t1_universe, 2, (0, 0), (2, 2))
    res = threshold_fairness_bi(t1_oracle, m, 0.5)
    # the first sweep at w = d = 2 commits 1 and 3; everything else has zero
    # marginal afterwards and no positive threshold admits it
    assert res.solution.members == {1, 3}
    assert t1_oracle.evaluate(res.solution) == 4


def test_threshold_single_element():
    universe = PartitionedUniverse([0])
    oracle = TagCoverOracle([["a"]])
    m = FairnessMatroid(universe, 1, (0,), (1,))
    for eps in (0.25, 0.5, 0.9):
        res = threshold_fairness_bi(oracle, m, eps)
        assert res.solution.members == {0}


def test_threshold_approximation_and_membership():
    rng = make_rng(46, 0)
    for _ in range(60):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        values = subset_values(oracle, universe.n)
        for eps in (0.25, 0.5):
            res = threshold_fairness_bi(oracle, matroid, eps)
            scaled = beta_extension(matroid, res.beta_used)
            assert is_member(scaled, res.solution)
            opt = fsm_opt(matroid, values)
            assert oracle.evaluate(res.solution) >= (1 - 2 * as_fraction(eps)) * opt


def test_threshold_query_budget():
    rng = make_rng(47, 0)
    for _ in range(30):
        universe, oracle = random_tagged_universe(rng)
        matroid = random_matroid(rng, universe)
        eps = [0.25, 0.5][int(rng.integers(0, 2))]
        counter = CountingOracle(oracle)
        res = threshold_fairness_bi(counter, matroid, eps)
        e = as_fraction(eps)
        passes = math.ceil(
            math.log(float(matroid.kappa / (e * e))) / -math.log(1 - float(e))
        )
        assert res.queries <= universe.n * passes + universe.n
        assert counter.marginal_queries == res.queries


def test_threshold_empty_objective(t1_universe):
    oracle = TagCoverOracle([[], [], [], []])
    m = FairnessMatroid(t1_universe, 2, (0, 0), (2, 2))
    res = threshold_fairness_bi(oracle, m, 0.5)
    assert len(res.solution) == 0
