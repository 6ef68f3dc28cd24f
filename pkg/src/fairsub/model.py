"""Ground set, color partition, fairness fractions, and solution types.

Element ids are dense integers 0..n-1 and color ids dense integers 0..N-1 so
that all per-color bookkeeping is array-indexed. Fairness fractions are exact
rationals; every feasibility comparison below is integer-exact (cross
multiplication via Fraction), never floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

FLOAT_DENOMINATOR = 10**6


def as_fraction(value, denominator: int = FLOAT_DENOMINATOR) -> Fraction:
    """Convert a number to an exact Fraction.

    Floats are snapped to the grid 1/denominator so that values written as
    decimals (0.1, 0.9, ...) become the rational a user meant rather than the
    nearest binary float. Fractions and ints pass through unchanged.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(round(value * denominator), denominator)
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(round(float(value) * denominator), denominator)
    raise TypeError(f"cannot convert {value!r} to a fraction")


class PartitionedUniverse:
    """n elements, each carrying exactly one color in 0..num_colors-1."""

    __slots__ = ("n", "num_colors", "_color_of", "groups")

    def __init__(self, color_of: Sequence[int], num_colors: int | None = None):
        colors = list(int(c) for c in color_of)
        self.n = len(colors)
        if num_colors is None:
            num_colors = max(colors) + 1 if colors else 0
        self.num_colors = num_colors
        for e, c in enumerate(colors):
            if not 0 <= c < num_colors:
                raise ValueError(f"element {e} has out-of-range color {c}")
        self._color_of = colors
        groups: list[list[int]] = [[] for _ in range(num_colors)]
        for e, c in enumerate(colors):
            groups[c].append(e)
        self.groups = [tuple(g) for g in groups]

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[int]]) -> "PartitionedUniverse":
        pairs = [(e, c) for c, group in enumerate(groups) for e in group]
        n = len(pairs)
        color_of = [-1] * n
        for e, c in pairs:
            if not 0 <= e < n or color_of[e] != -1:
                raise ValueError("groups must partition 0..n-1 without overlap")
            color_of[e] = c
        return cls(color_of, num_colors=len(groups))

    def color_of(self, e: int) -> int:
        return self._color_of[e]

    def group_sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    def elements(self) -> range:
        return range(self.n)

    def __repr__(self):
        return f"PartitionedUniverse(n={self.n}, colors={self.num_colors})"


@dataclass(frozen=True)
class FairnessFractions:
    """Per-color lower/upper share bounds, stored exactly.

    Feasibility of the share constraints requires sum(p) <= 1 <= sum(q);
    violating inputs are rejected because no solution could ever satisfy them.
    """

    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.p) != len(self.q):
            raise ValueError("p and q must have one entry per color")
        for c, (pc, qc) in enumerate(zip(self.p, self.q)):
            if not (0 <= pc <= qc <= 1):
                raise ValueError(f"need 0 <= p_{c} <= q_{c} <= 1, got {pc}, {qc}")
        if sum(self.p) > 1:
            raise ValueError("sum of lower fractions exceeds 1; no set can be fair")
        if sum(self.q) < 1:
            raise ValueError("sum of upper fractions is below 1; no set can be fair")

    @classmethod
    def build(cls, p: Sequence, q: Sequence) -> "FairnessFractions":
        return cls(tuple(as_fraction(v) for v in p), tuple(as_fraction(v) for v in q))

    @classmethod
    def uniform(cls, num_colors: int, p_total, q_total) -> "FairnessFractions":
        """Shares p_c = p_total/N, q_c = q_total/N, computed exactly."""
        pc = as_fraction(p_total) / num_colors
        qc = as_fraction(q_total) / num_colors
        return cls((pc,) * num_colors, (qc,) * num_colors)

    @property
    def num_colors(self) -> int:
        return len(self.p)


class Solution:
    """Mutable element set with cached per-color counts.

    Single-writer: mutate from one thread only. The cached counts are kept in
    lockstep with the member set by add/remove.
    """

    __slots__ = ("universe", "_members", "_counts")

    def __init__(self, universe: PartitionedUniverse, members: Iterable[int] = ()):
        self.universe = universe
        self._members: set[int] = set()
        self._counts = [0] * universe.num_colors
        for e in members:
            self.add(e)

    def add(self, e: int):
        if e in self._members:
            raise ValueError(f"element {e} already in solution")
        if not 0 <= e < self.universe.n:
            raise ValueError(f"element {e} outside universe")
        self._members.add(e)
        self._counts[self.universe.color_of(e)] += 1

    def remove(self, e: int):
        self._members.remove(e)
        self._counts[self.universe.color_of(e)] -= 1

    def count(self, color: int) -> int:
        return self._counts[color]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(self._counts)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self._members)

    def copy(self) -> "Solution":
        return Solution(self.universe, self._members)

    def __contains__(self, e: int) -> bool:
        return e in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[int]:
        return iter(self._members)

    def __repr__(self):
        return f"Solution({sorted(self._members)})"


@dataclass
class FscInstance:
    """A cover instance: universe, share bounds, threshold, objective oracle.

    The threshold is validated against f(U) at construction; a threshold above
    the value of the full ground set can never be covered.
    """

    universe: PartitionedUniverse
    fractions: FairnessFractions
    tau: float
    oracle: object

    def __post_init__(self):
        if self.fractions.num_colors != self.universe.num_colors:
            raise ValueError("fractions and universe disagree on color count")
        if self.tau < 0:
            raise ValueError("threshold must be nonnegative")
        full = self.oracle.evaluate(self.universe.elements())
        if self.tau > full:
            from .errors import InfeasibleThresholdError

            raise InfeasibleThresholdError(
                f"threshold {self.tau} exceeds f(U) = {full}"
            )


def share_bounds_hold(fractions: FairnessFractions, solution: Solution) -> bool:
    """p_c*|S| <= |S inter U_c| <= q_c*|S| for every color, exactly."""
    size = len(solution)
    for c in range(fractions.num_colors):
        cnt = solution.count(c)
        if fractions.p[c] * size > cnt or cnt > fractions.q[c] * size:
            return False
    return True


def fsc_feasible(instance: FscInstance, solution: Solution) -> bool:
    """True iff the solution meets every share bound and covers the threshold.

    The empty set satisfies the share bounds vacuously, so it is feasible
    exactly when tau == 0.
    """
    if not share_bounds_hold(instance.fractions, solution):
        return False
    return instance.oracle.evaluate(solution) >= instance.tau


def fairness_difference(solution: Solution) -> Fraction:
    """Imbalance metric: (max per-color count - min per-color count) / |S|.

    Colors with zero members participate in the min. Undefined on the empty
    solution.
    """
    if len(solution) == 0:
        raise ValueError("fairness difference is undefined for an empty solution")
    counts = solution.counts
    return Fraction(max(counts) - min(counts), len(solution))
