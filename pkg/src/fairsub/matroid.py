"""Fairness matroids, scaled relaxations, and exchange sequences.

A fairness matroid over a partitioned universe is parameterized by a total
budget kappa and per-color integer bounds (lower, upper):

    S is independent  iff  |S inter U_c| <= upper_c for every color c
                      and  sum_c max(|S inter U_c|, lower_c) <= kappa.

Its scaled relaxation by an integer factor beta multiplies all three
parameters by beta. Elements with ids >= universe.n act as colorless dummies:
they belong to every independent set and are used to pad undersized sets
(their only purpose is bookkeeping; they carry no objective value and are
stripped before solutions are returned).
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvariantError
from .model import PartitionedUniverse, Solution


class RankDeficiencyWarning(UserWarning):
    """The matroid cannot reach its nominal budget (a group is too small)."""


class FairnessMatroid:
    __slots__ = ("universe", "kappa", "lower", "upper", "bounds_consistent")

    def __init__(self, universe: PartitionedUniverse, kappa: int,
                 lower: Sequence[int], upper: Sequence[int]):
        if len(lower) != universe.num_colors or len(upper) != universe.num_colors:
            raise ValueError("lower/upper must have one entry per color")
        lower = tuple(int(v) for v in lower)
        upper = tuple(int(v) for v in upper)
        if kappa < 0:
            raise ValueError("kappa must be nonnegative")
        for c, (lc, uc) in enumerate(zip(lower, upper)):
            if not 0 <= lc <= uc:
                raise ValueError(f"need 0 <= lower_{c} <= upper_{c}, got {lc}, {uc}")
        self.universe = universe
        self.kappa = int(kappa)
        self.lower = lower
        self.upper = upper
        # sum(lower) <= kappa <= sum(upper) is what makes the budget attainable;
        # kept as a flag (rank() reports the shortfall) so degenerate
        # parameterizations remain constructible for diagnostics.
        self.bounds_consistent = sum(lower) <= kappa <= sum(upper)

    def params(self) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        return self.kappa, self.lower, self.upper

    def __eq__(self, other):
        return (
            isinstance(other, FairnessMatroid)
            and self.universe is other.universe
            and self.params() == other.params()
        )

    def __repr__(self):
        return f"FairnessMatroid(kappa={self.kappa}, lower={self.lower}, upper={self.upper})"


def beta_extension(matroid: FairnessMatroid, beta: int) -> FairnessMatroid:
    """The relaxation with every parameter multiplied by integer beta >= 1."""
    if beta < 1:
        raise ValueError("beta must be a positive integer")
    beta = int(beta)
    return FairnessMatroid(
        matroid.universe,
        beta * matroid.kappa,
        tuple(beta * l for l in matroid.lower),
        tuple(beta * u for u in matroid.upper),
    )


def _color_counts(universe: PartitionedUniverse, members: Iterable[int]) -> list[int]:
    counts = [0] * universe.num_colors
    for e in members:
        if e < universe.n:  # ids beyond the universe are colorless dummies
            counts[universe.color_of(e)] += 1
    return counts


def is_member(matroid: FairnessMatroid, members) -> bool:
    """Membership test; accepts a Solution or any iterable of element ids."""
    if isinstance(members, Solution):
        counts = members.counts
    else:
        counts = _color_counts(matroid.universe, members)
    total = 0
    for c, cnt in enumerate(counts):
        if cnt > matroid.upper[c]:
            return False
        total += max(cnt, matroid.lower[c])
    return total <= matroid.kappa


def can_add(matroid: FairnessMatroid, solution: Solution, x: int) -> bool:
    """Whether solution + {x} stays independent. False if x is already in."""
    if x in solution:
        return False
    tracker = IndependenceTracker(matroid, solution)
    return tracker.can_add(x)


class IndependenceTracker:
    """O(1) incremental feasibility for one matroid and one growing set.

    Caches the per-color counts and the running value
    sum_c max(count_c, lower_c) so that greedy inner loops can test and commit
    additions without rescanning.
    """

    __slots__ = ("matroid", "_counts", "_summax", "_members", "_size")

    def __init__(self, matroid: FairnessMatroid, members: Iterable[int] = ()):
        self.matroid = matroid
        self._counts = [0] * matroid.universe.num_colors
        self._members: set[int] = set()
        self._size = 0
        for e in members:
            self._counts_add(e)
        self._summax = sum(
            max(cnt, lo) for cnt, lo in zip(self._counts, matroid.lower)
        )

    def _counts_add(self, e: int):
        self._members.add(e)
        self._size += 1
        if e < self.matroid.universe.n:
            self._counts[self.matroid.universe.color_of(e)] += 1

    def can_add(self, x: int) -> bool:
        if x in self._members:
            return False
        if x >= self.matroid.universe.n:
            return True  # dummies are independent everywhere
        c = self.matroid.universe.color_of(x)
        cnt = self._counts[c]
        if cnt + 1 > self.matroid.upper[c]:
            return False
        bump = 1 if cnt >= self.matroid.lower[c] else 0
        return self._summax + bump <= self.matroid.kappa

    def add(self, x: int):
        if x in self._members:
            raise ValueError(f"{x} already tracked")
        if x < self.matroid.universe.n:
            c = self.matroid.universe.color_of(x)
            if self._counts[c] >= self.matroid.lower[c]:
                self._summax += 1
        self._counts_add(x)

    def members(self) -> frozenset[int]:
        return frozenset(self._members)

    def __contains__(self, x: int) -> bool:
        return x in self._members

    def __len__(self) -> int:
        return self._size


def rank(matroid: FairnessMatroid) -> int:
    """Size of a maximal independent set, found by greedy extension.

    When the budget is attainable this equals kappa. If the greedy extension
    stalls earlier (a group smaller than its bounds require), the achieved
    size is returned and a RankDeficiencyWarning flags the shortfall.
    """
    tracker = IndependenceTracker(matroid)
    for x in matroid.universe.elements():
        if tracker.can_add(x):
            tracker.add(x)
    achieved = len(tracker)
    if achieved != matroid.kappa:
        sizes = matroid.universe.group_sizes()
        attainable = sum(min(u, s) for u, s in zip(matroid.upper, sizes))
        warnings.warn(
            f"matroid rank {achieved} falls short of kappa={matroid.kappa} "
            f"(sum of min(upper, group size) = {attainable}, "
            f"sum of lower = {sum(matroid.lower)})",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return achieved


def padded_is_member(matroid: FairnessMatroid, size_cap: int, members) -> bool:
    """Membership in the dummy-padded truncation of the matroid.

    A set mixing real and dummy ids is independent iff its real part is
    independent and its total size (dummies included) stays within size_cap.
    This is the matroid under which swap rounding merges padded bases.
    """
    members = list(members)
    if len(members) > size_cap:
        return False
    return is_member(matroid, members)


def symmetric_exchange(matroid: FairnessMatroid, size_cap: int,
                       first: frozenset, second: frozenset, leaving: int) -> int:
    """Find j in second-first with first-leaving+j and second-j+leaving both
    independent in the padded truncation. Exists whenever both sets are bases.
    Lowest valid id is returned for determinism."""
    base_first = set(first) - {leaving}
    for j in sorted(second - first):
        if padded_is_member(matroid, size_cap, base_first | {j}) and padded_is_member(
            matroid, size_cap, (second - {j}) | {leaving}
        ):
            return j
    raise InvariantError(
        "no symmetric exchange found; inputs were not bases of the padded matroid"
    )


@dataclass(frozen=True)
class ExchangeSequence:
    """Ordered multiset of beta copies of a base T, aligned to a permutation
    of a base of the scaled matroid so every prefix stays independent."""

    entries: tuple[int, ...]


def _validate_exchange_inputs(matroid, beta, s_perm, target):
    if beta < 1:
        raise ValueError("beta must be a positive integer")
    scaled = beta_extension(matroid, beta)
    s_perm = tuple(int(e) for e in s_perm)
    target = sorted(int(e) for e in target)
    if len(set(s_perm)) != len(s_perm):
        raise ValueError("permutation entries must be distinct")
    if len(s_perm) != scaled.kappa:
        raise ValueError(
            f"permutation must list {scaled.kappa} elements (pad with dummy ids "
            f">= {matroid.universe.n} if the set is smaller); got {len(s_perm)}"
        )
    if not is_member(scaled, s_perm):
        raise ValueError("permutation is not independent in the scaled matroid")
    if len(set(target)) != len(target) or len(target) != matroid.kappa:
        raise ValueError(f"target must be a base of size {matroid.kappa}")
    if any(e >= matroid.universe.n for e in target):
        raise ValueError("target base must not contain dummy elements")
    if not is_member(matroid, target):
        raise ValueError("target is not independent in the matroid")
    return scaled, s_perm, target


def build_exchange_sequence(matroid: FairnessMatroid, beta: int,
                            s_perm: Sequence[int], target: Iterable[int]
                            ) -> ExchangeSequence:
    """Construct the exchange sequence by backward induction.

    Walking i from beta*kappa down to 1, the invariant is that the multiset
    (s_1..s_{i}, e_{i+1}..e_{beta*kappa}) respects the scaled per-color and
    budget bounds with each target element used at most beta times. After
    dropping s_i there are two cases:

      * some color sits strictly below beta*lower_c: refill it with a target
        element of that color that still has copies left;
      * otherwise the multiset is one short of beta*kappa, so some color holds
        fewer entries than beta times its target count: take a target element
        of such a color with copies left.

    Ties are broken by lowest element id so runs are reproducible.
    """
    universe = matroid.universe
    scaled, s_perm, target = _validate_exchange_inputs(matroid, beta, s_perm, target)
    m = scaled.kappa
    color_of = universe.color_of

    group_count = _color_counts(universe, s_perm)
    elem_count = Counter(e for e in s_perm if e < universe.n)
    target_group = _color_counts(universe, target)
    lower_scaled = scaled.lower

    entries: list[int] = []
    for i in range(m - 1, -1, -1):
        s_i = s_perm[i]
        if s_i < universe.n:
            group_count[color_of(s_i)] -= 1
            elem_count[s_i] -= 1

        deficient = [
            c for c in range(universe.num_colors)
            if group_count[c] < lower_scaled[c]
        ]
        choice = None
        if deficient:
            wanted = set(deficient)
            for x in target:
                if color_of(x) in wanted and elem_count[x] < beta:
                    choice = x
                    break
        else:
            for x in target:
                c = color_of(x)
                if group_count[c] < target_group[c] * beta and elem_count[x] < beta:
                    choice = x
                    break
        if choice is None:
            raise InvariantError(
                f"exchange construction stuck at position {i + 1}; "
                "inputs violate the base preconditions"
            )
        entries.append(choice)
        group_count[color_of(choice)] += 1
        elem_count[choice] += 1

    entries.reverse()
    return ExchangeSequence(tuple(entries))


def verify_exchange(matroid: FairnessMatroid, beta: int, s_perm: Sequence[int],
                    sequence: ExchangeSequence | Sequence[int],
                    target: Iterable[int]) -> bool:
    """Pure checker for the two exchange-sequence properties.

    Checks that the sequence uses every target element exactly beta times and
    that prefix(i) of the permutation plus the (i+1)-th sequence entry is
    independent in the scaled matroid, for every i.
    """
    entries = tuple(sequence.entries if isinstance(sequence, ExchangeSequence)
                    else sequence)
    try:
        scaled, s_perm, target = _validate_exchange_inputs(
            matroid, beta, s_perm, target
        )
    except ValueError:
        return False
    if len(entries) != scaled.kappa:
        return False
    if Counter(entries) != {t: beta for t in target}:
        return False

    universe = matroid.universe
    counts = [0] * universe.num_colors
    prefix: set[int] = set()
    for i, e in enumerate(entries):
        # union counts of prefix(i) and {e}
        trial = list(counts)
        if e not in prefix and e < universe.n:
            trial[universe.color_of(e)] += 1
        total = 0
        for c, cnt in enumerate(trial):
            if cnt > scaled.upper[c]:
                return False
            total += max(cnt, scaled.lower[c])
        if total > scaled.kappa:
            return False
        s_i = s_perm[i]
        prefix.add(s_i)
        if s_i < universe.n:
            counts[universe.color_of(s_i)] += 1
    return True
