import math
from fractions import Fraction

import pytest

from fairsub.continuous import SamplePlan, beta_continuous, continuous_threshold_greedy
from fairsub.convert import (
    ConverterConfig,
    RepairShortfallWarning,
    convert_continuous,
    convert_fair,
    fairness_repair,
    gate_threshold,
    kappa_guesses,
    relaxed_fairness_flags,
    sample_count_gate,
)
from fairsub.discrete import FsmResult, beta_for_epsilon, greedy_fairness_bi, threshold_fairness_bi
from fairsub.matroid import beta_extension, is_member
from fairsub.model import (
    FairnessFractions,
    FscInstance,
    PartitionedUniverse,
    Solution,
    as_fraction,
)
from fairsub.oracles import CountingOracle, TagCoverOracle
from fairsub.rng import make_rng

from bruteforce import relaxed_ok
from instances import random_fsc_instance


def _greedy_config(eps, alpha, **kw):
    return ConverterConfig(
        alpha=alpha, gamma=1 - as_fraction(eps), beta=beta_for_epsilon(eps), **kw
    )


def test_kappa_guesses_grow_exactly():
    assert list(kappa_guesses(1, 20)) == [2, 4, 8, 16, 20]
    assert list(kappa_guesses(0.5, 10)) == [2, 3, 5, 8, 10]
    seq = list(kappa_guesses(0.2, 40))
    assert seq == [2, 3, 4, 5, 6, 8, 10, 12, 15, 18, 22, 27, 33, 40]
    assert all(b > a for a, b in zip(seq, seq[1:]))
    # exact rational growth: ceil((6/5) * k) never picks up float dust
    assert [math.ceil(as_fraction(1.2) * k) for k in (5, 25, 55)] == [6, 30, 66]


def test_kappa_guess_count_bound():
    alpha, cap = 0.5, 97
    seq = list(kappa_guesses(alpha, cap))
    assert len(seq) <= math.ceil(math.log(cap, 1 + alpha)) + 1


# ---------------------------------------------------------------------------
# fairness repair


def test_repair_fills_lower_bounds(t1_universe, t1_oracle):
    s = Solution(t1_universe, {2, 3})
    fairness_repair(s, t1_universe, [2, 2], [2, 2], 4)
    assert s.members == {0, 1, 2, 3}


def test_repair_noop_when_satisfied(t1_universe):
    s = Solution(t1_universe, {0, 2})
    fairness_repair(s, t1_universe, [1, 1], [1, 1], 2)
    assert s.members == {0, 2}


def test_repair_zero_lower_fills_by_color_order(t1_universe):
    s = Solution(t1_universe)
    fairness_repair(s, t1_universe, [0, 0], [2, 2], 3)
    assert s.members == {0, 1, 2}  # color 0 exhausted first, then color 1


def test_repair_warns_on_shortfall(t1_universe):
    s = Solution(t1_universe)
    with pytest.warns(RepairShortfallWarning):
        fairness_repair(s, t1_universe, [0, 0], [1, 1], 4)
    assert s.members == {0, 2}  # one per color is all the caps allow


# ---------------------------------------------------------------------------
# convert_fair


def _t1_instance(t1_universe, t1_oracle, tau):
    fractions = FairnessFractions.build(["2/5", "2/5"], ["3/5", "3/5"])
    return FscInstance(t1_universe, fractions, tau, t1_oracle)


def test_convert_fair_worked_example(t1_universe, t1_oracle):
    instance = _t1_instance(t1_universe, t1_oracle, tau=4)
    result = convert_fair(
        instance,
        lambda o, m: greedy_fairness_bi(o, m, 0.5),
        _greedy_config(0.5, alpha=1),
    )
    assert result.gate_passed
    assert result.kappa_final == 2 and result.guesses_tried == 1
    assert result.solution.members == {0, 1, 2, 3}
    assert t1_oracle.evaluate(result.solution) == 4
    assert len(result.solution) <= 2 * 2 * 2  # (1+alpha) * beta * |OPT|
    assert all(result.relaxed_fair)


def test_convert_fair_zero_threshold(t1_universe, t1_oracle):
    instance = _t1_instance(t1_universe, t1_oracle, tau=0)
    result = convert_fair(
        instance,
        lambda o, m: greedy_fairness_bi(o, m, 0.5),
        _greedy_config(0.5, alpha=0.5),
    )
    assert result.gate_passed and result.guesses_tried == 1
    assert len(result.solution) == 2 * 2  # beta * kappa_0


def test_convert_fair_theorem_clauses_on_random_instances():
    rng = make_rng(71, 0)
    alpha, eps = 0.5, 0.5
    beta = beta_for_epsilon(eps)
    checked = 0
    while checked < 60:
        drawn = random_fsc_instance(rng)
        if drawn is None:
            continue
        instance, values, opt = drawn
        assert opt is not None
        opt_size = opt[0]
        assumption = sum(
            min(q, Fraction(len(g)) / (beta * 2 * opt_size))
            for q, g in zip(instance.fractions.q, instance.universe.groups)
        ) >= 1
        if not assumption:
            continue
        result = convert_fair(
            instance,
            lambda o, m: greedy_fairness_bi(o, m, eps),
            _greedy_config(eps, alpha=alpha),
        )
        assert result.gate_passed
        assert len(result.solution) <= (1 + alpha) * beta * opt_size
        assert instance.oracle.evaluate(result.solution) >= Fraction(1, 2) * instance.tau
        assert all(result.relaxed_fair)
        assert relaxed_ok(
            instance.fractions, beta, result.solution.counts, len(result.solution)
        )
        checked += 1


def test_convert_fair_gate_passes_once_guess_reaches_opt():
    rng = make_rng(72, 0)
    checked = 0
    while checked < 25:
        drawn = random_fsc_instance(rng, max_n=10)
        if drawn is None:
            continue
        instance, values, opt = drawn
        result = convert_fair(
            instance,
            lambda o, m: greedy_fairness_bi(o, m, 0.5),
            _greedy_config(0.5, alpha=0.5),
        )
        for entry in result.trace:
            if entry.kappa >= opt[0]:
                assert entry.passed
        assert result.trace[-1].passed
        checked += 1


def test_convert_fair_query_reconciliation(t1_universe, t1_oracle):
    outer = CountingOracle(t1_oracle)
    fractions = FairnessFractions.build(["2/5", "2/5"], ["3/5", "3/5"])
    instance = FscInstance(t1_universe, fractions, 4, outer)
    result = convert_fair(
        instance,
        lambda o, m: greedy_fairness_bi(o, m, 0.5),
        _greedy_config(0.5, alpha=1),
    )
    assert result.total_queries == outer.marginal_queries
    assert result.total_queries == sum(t.queries for t in result.trace)


def test_convert_fair_exhausts_guesses_with_weak_subroutine(t1_universe, t1_oracle):
    instance = _t1_instance(t1_universe, t1_oracle, tau=4)

    def stub(oracle, matroid):
        return FsmResult(Solution(matroid.universe), 0, 2, 0.5)

    config = ConverterConfig(alpha=0.5, gamma=0.9, beta=2, max_kappa=1)
    result = convert_fair(instance, stub, config)
    assert not result.gate_passed
    assert result.guesses_tried == len(result.trace) == 1
    assert len(result.solution) == 2  # best repaired attempt is carried out


def test_convert_fair_rejects_beta_mismatch(t1_universe, t1_oracle):
    from fairsub.errors import InvariantError

    instance = _t1_instance(t1_universe, t1_oracle, tau=1)
    with pytest.raises(InvariantError):
        convert_fair(
            instance,
            lambda o, m: greedy_fairness_bi(o, m, 0.5),  # beta_used = 2
            ConverterConfig(alpha=0.5, gamma=0.5, beta=3),
        )


def test_convert_fair_with_threshold_subroutine():
    rng = make_rng(73, 0)
    checked = 0
    while checked < 15:
        drawn = random_fsc_instance(rng, max_n=10)
        if drawn is None:
            continue
        instance, values, opt = drawn
        eps = 0.25
        config = ConverterConfig(
            alpha=0.5, gamma=1 - 2 * as_fraction(eps), beta=beta_for_epsilon(eps)
        )
        result = convert_fair(
            instance, lambda o, m: threshold_fairness_bi(o, m, eps), config
        )
        assert result.gate_passed
        assert instance.oracle.evaluate(result.solution) >= config.gamma * instance.tau
        assert all(result.relaxed_fair)
        checked += 1


# ---------------------------------------------------------------------------
# continuous converter


def test_sample_count_gate_values():
    assert sample_count_gate(4, 0.5, 0.1) == 1462
    assert sample_count_gate(4, 0.5, 0.1, scale=2000) == 1
    assert sample_count_gate(5000, 0.1, 0.01) == 130_577_920  # ~1.306e8, report only


def test_gate_threshold_limits():
    assert gate_threshold(1, 0, 7) == 7  # eps -> 0 collapses to the plain gate
    assert gate_threshold(1, 0.5, 8) == ((1 - Fraction(1, 4)) - Fraction(1, 6)) * 8
    assert gate_threshold(0.5, 0.1, 10) < 5


def test_convert_continuous_t1_membership_every_seed(t1_universe, t1_oracle):
    fractions = FairnessFractions.build(["2/5", "2/5"], ["3/5", "3/5"])
    instance = FscInstance(t1_universe, fractions, 4, t1_oracle)
    eps = 0.5
    beta = beta_continuous(eps)
    for seed in range(6):
        plan = SamplePlan(per_estimate_samples=32, rng_seed=seed)
        config = ConverterConfig(
            alpha=1, gamma=0.05, beta=beta, epsilon=eps, delta=0.1, scale=100
        )
        result = convert_continuous(
            instance,
            lambda o, m: continuous_threshold_greedy(o, m, eps, 0.1, plan),
            config,
            plan,
        )
        assert result.gate_passed
        guess_matroid_scaled = beta_extension(
            _guess_matroid_like(instance, result.kappa_final), beta
        )
        assert is_member(guess_matroid_scaled, result.solution)
        assert all(result.relaxed_fair)


def _guess_matroid_like(instance, kappa):
    from fairsub.matroid import FairnessMatroid

    lower = [math.floor(p * kappa) for p in instance.fractions.p]
    upper = [math.ceil(q * kappa) for q in instance.fractions.q]
    return FairnessMatroid(instance.universe, kappa, lower, upper)


def test_convert_continuous_expected_value_bound():
    """Mean value over seeds clears 0.9 * ratio * tau at eps = 0.1."""
    rng = make_rng(74, 0)
    universe = PartitionedUniverse([0, 0, 1, 1, 1])
    oracle = TagCoverOracle([["a"], ["b"], ["c"], ["d"], ["a", "c"]])
    fractions = FairnessFractions.build([0, 0], ["3/5", "3/5"])
    tau = 3
    instance = FscInstance(universe, fractions, tau, oracle)
    eps = 0.1
    gamma = 1 - 7 * as_fraction(eps)
    beta = beta_continuous(eps)
    ratio = gate_threshold(gamma, eps, 1) / (
        1 + as_fraction(eps) / 2 + as_fraction(eps) / (3 * gamma)
    )
    values = []
    for seed in range(20):
        plan = SamplePlan.for_instance(universe.n, 2, eps, rng_seed=seed, scale=200)
        config = ConverterConfig(
            alpha=0.5, gamma=gamma, beta=beta, epsilon=eps, delta=0.1, scale=200
        )
        result = convert_continuous(
            instance,
            lambda o, m: continuous_threshold_greedy(o, m, eps, 0.1, plan),
            config,
            plan,
        )
        values.append(oracle.evaluate(result.solution))
    assert sum(values) / len(values) >= 0.9 * float(ratio * tau)


def test_relaxed_flags_match_reference(t1_universe):
    fractions = FairnessFractions.build(["2/5", "2/5"], ["3/5", "3/5"])
    for members in [{0, 1, 2, 3}, {1, 3}, {0, 1, 2}, {0}]:
        s = Solution(t1_universe, members)
        for beta in (1, 2, 3):
            flags = relaxed_fairness_flags(fractions, beta, s)
            assert all(flags) == relaxed_ok(fractions, beta, s.counts, len(s))
