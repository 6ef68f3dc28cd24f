"""Exchange-sequence construction and verification.

The library promises: for any base T of the matroid and any permutation of a
base of the beta-scaled matroid (padded with dummies when short), it can
order beta copies of T so that every prefix of the permutation plus the next
ordered element stays independent in the scaled relaxation.
"""

import itertools

import pytest

from fairsub.errors import InvariantError
from fairsub.matroid import (
    FairnessMatroid,
    IndependenceTracker,
    beta_extension,
    build_exchange_sequence,
    is_member,
    verify_exchange,
)
from fairsub.model import PartitionedUniverse
from fairsub.rng import make_rng


@pytest.fixture
def tight_matroid(t1_universe):
    return FairnessMatroid(t1_universe, 2, (1, 1), (1, 1))


def test_worked_example_is_valid(tight_matroid):
    seq = build_exchange_sequence(tight_matroid, 2, (0, 1, 2, 3), {1, 3})
    assert verify_exchange(tight_matroid, 2, (0, 1, 2, 3), seq, {1, 3})
    # regression pin for the deterministic construction
    assert seq.entries == (1, 1, 3, 3)
    # the hand-written ordering (1, 3, 1, 3) is another valid certificate
    assert verify_exchange(tight_matroid, 2, (0, 1, 2, 3), (1, 3, 1, 3), {1, 3})


def test_beta_one_gives_a_permutation(t1_universe):
    m = FairnessMatroid(t1_universe, 2, (0, 0), (1, 1))
    seq = build_exchange_sequence(m, 1, (0, 3), {1, 2})
    assert sorted(seq.entries) == [1, 2]
    assert verify_exchange(m, 1, (0, 3), seq, {1, 2})


def test_multiplicity_violation_rejected(tight_matroid):
    assert not verify_exchange(tight_matroid, 2, (0, 1, 2, 3), (1, 1, 1, 3), {1, 3})
    assert not verify_exchange(tight_matroid, 2, (0, 1, 2, 3), (1, 3, 1), {1, 3})


def test_adversarial_reorder_rejected():
    universe = PartitionedUniverse([0, 0, 0, 1, 1, 1])
    m = FairnessMatroid(universe, 2, (1, 1), (1, 1))
    target = {0, 3}
    s_perm = (1, 2, 4, 5)
    seq = build_exchange_sequence(m, 2, s_perm, target)
    assert verify_exchange(m, 2, s_perm, seq, target)
    broken = None
    for perm in itertools.permutations(seq.entries):
        if not verify_exchange(m, 2, s_perm, perm, target):
            broken = perm
            break
    assert broken is not None, "expected some reordering to break a prefix"


def test_dummy_padding_for_short_sets(t1_universe):
    m = FairnessMatroid(t1_universe, 2, (0, 0), (2, 2))
    # independent set {1} of the 2-extension, padded to size 4 with dummies
    s_perm = (1, 4, 5, 6)
    seq = build_exchange_sequence(m, 2, s_perm, {1, 3})
    assert verify_exchange(m, 2, s_perm, seq, {1, 3})


def test_input_validation(t1_universe, tight_matroid):
    with pytest.raises(ValueError):
        build_exchange_sequence(tight_matroid, 0, (0, 1, 2, 3), {1, 3})
    with pytest.raises(ValueError):  # wrong length
        build_exchange_sequence(tight_matroid, 2, (0, 1, 2), {1, 3})
    with pytest.raises(ValueError):  # duplicate entries
        build_exchange_sequence(tight_matroid, 2, (0, 1, 1, 3), {1, 3})
    with pytest.raises(ValueError):  # target not a base
        build_exchange_sequence(tight_matroid, 2, (0, 1, 2, 3), {1})
    with pytest.raises(ValueError):  # target of the wrong matroid
        build_exchange_sequence(tight_matroid, 2, (0, 1, 2, 3), {0, 1})
    dependent = (0, 1, 2, 3)
    narrow = FairnessMatroid(t1_universe, 2, (0, 0), (1, 1))
    with pytest.raises(ValueError):  # permutation dependent in the scaled matroid
        build_exchange_sequence(narrow, 1, (0, 1), {0, 2})
    del dependent


def _enumerate_bases(matroid, size):
    universe = matroid.universe
    for combo in itertools.combinations(range(universe.n), size):
        if is_member(matroid, combo):
            yield combo


def test_randomized_instances_always_verify():
    rng = make_rng(31, 0)
    done = 0
    while done < 150:
        n = int(rng.integers(2, 9))
        num_colors = int(rng.integers(1, 3))
        colors = [int(c) for c in rng.integers(0, num_colors, size=n)]
        for c in range(num_colors):
            colors[c % n] = c
        universe = PartitionedUniverse(colors, num_colors)
        sizes = universe.group_sizes()
        upper = [int(rng.integers(1, s + 1)) for s in sizes]
        lower = [int(rng.integers(0, u + 1)) for u in upper]
        kappa = sum(lower) + int(rng.integers(0, sum(upper) - sum(lower) + 1))
        if kappa == 0:
            continue
        matroid = FairnessMatroid(universe, kappa, lower, upper)
        beta = int(rng.integers(1, 4))
        scaled = beta_extension(matroid, beta)
        bases_small = list(_enumerate_bases(matroid, kappa))
        if not bases_small:
            continue
        target = bases_small[int(rng.integers(0, len(bases_small)))]
        # grow a maximal independent set of the scaled matroid, pad if short
        tracker = IndependenceTracker(scaled)
        for x in rng.permutation(n):
            if tracker.can_add(int(x)):
                tracker.add(int(x))
        s = sorted(tracker.members())
        s += list(range(universe.n, universe.n + scaled.kappa - len(s)))
        s_perm = [s[i] for i in rng.permutation(len(s))]
        seq = build_exchange_sequence(matroid, beta, s_perm, target)
        assert verify_exchange(matroid, beta, s_perm, seq, target), (
            matroid, beta, s_perm, target, seq,
        )
        done += 1
