"""Monotone submodular objectives: neighborhood coverage and tag coverage.

Both oracles are normalized to f(empty) = 0 and evaluate with integer
arithmetic, so marginal(S, e) == evaluate(S | {e}) - evaluate(S) holds
exactly. Greedy loops should thread a CoverState through their iterations:
state.gain(e) is an O(deg) incremental marginal instead of the O(|S| * deg)
from-scratch one.

Coverage uses open neighborhoods: a vertex covers its neighbors, not itself,
unless it carries a self-loop.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError


def _ids(members) -> Iterable[int]:
    return members if not hasattr(members, "members") else members.members


class CoverState:
    """Incremental evaluation state for one growing set."""

    def gain(self, e: int):
        raise NotImplementedError

    def add(self, e: int):
        raise NotImplementedError

    @property
    def value(self):
        raise NotImplementedError


class SubmodularOracle:
    """Interface: evaluate / marginal plus incremental and batched variants."""

    n: int

    def evaluate(self, members):
        st = self.state()
        for e in _ids(members):
            st.add(e)
        return st.value

    def marginal(self, members, e: int):
        st = self.state()
        for x in _ids(members):
            st.add(x)
        return st.gain(e)

    def state(self) -> CoverState:
        raise NotImplementedError

    def evaluate_many(self, membership: np.ndarray) -> np.ndarray:
        """Values of f for each row of a boolean membership matrix."""
        return np.array([self.evaluate(np.flatnonzero(row)) for row in membership])

    def marginal_many(self, membership: np.ndarray, e: int) -> np.ndarray:
        """Marginal of e against each row; zero where e is already in the row."""
        return np.array(
            [self.marginal(np.flatnonzero(row), e) for row in membership]
        )


class _CoverageState(CoverState):
    __slots__ = ("_oracle", "_covered", "_value")

    def __init__(self, oracle: "CoverageOracle"):
        self._oracle = oracle
        self._covered = np.zeros(oracle.n, dtype=bool)
        self._value = 0

    def gain(self, e: int) -> int:
        neigh = self._oracle.adjacency[e]
        if neigh.size == 0:
            return 0
        return int(neigh.size - np.count_nonzero(self._covered[neigh]))

    def add(self, e: int):
        neigh = self._oracle.adjacency[e]
        if neigh.size:
            newly = ~self._covered[neigh]
            self._value += int(np.count_nonzero(newly))
            self._covered[neigh] = True

    @property
    def value(self) -> int:
        return self._value


class CoverageOracle(SubmodularOracle):
    """f(S) = size of the union of the neighborhoods of the vertices in S."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise DatasetError(f"edge ({u}, {v}) references unknown vertex")
            nbrs[u].add(v)
            if u != v:
                nbrs[v].add(u)
        self.adjacency = [np.array(sorted(s), dtype=np.int64) for s in nbrs]
        self._adj_matrix = None

    def state(self) -> _CoverageState:
        return _CoverageState(self)

    def evaluate(self, members):
        st = self.state()
        for e in _ids(members):
            if not 0 <= e < self.n:
                raise DatasetError(f"unknown vertex id {e}")
            st.add(e)
        return st.value

    def _matrix(self) -> np.ndarray:
        if self._adj_matrix is None:
            m = np.zeros((self.n, self.n), dtype=np.uint8)
            for v, neigh in enumerate(self.adjacency):
                m[v, neigh] = 1
            self._adj_matrix = m
        return self._adj_matrix

    def evaluate_many(self, membership: np.ndarray) -> np.ndarray:
        covered = membership.astype(np.uint8) @ self._matrix() > 0
        return covered.sum(axis=1)

    def marginal_many(self, membership: np.ndarray, e: int) -> np.ndarray:
        covered = membership.astype(np.uint8) @ self._matrix() > 0
        row = self._matrix()[e].astype(bool)
        return (~covered & row).sum(axis=1)


class _TagState(CoverState):
    __slots__ = ("_oracle", "_covered", "_value")

    def __init__(self, oracle: "TagCoverOracle"):
        self._oracle = oracle
        self._covered = 0
        self._value = 0

    def gain(self, e: int) -> int:
        return (self._oracle.masks[e] & ~self._covered).bit_count()

    def add(self, e: int):
        new = self._oracle.masks[e] & ~self._covered
        self._value += new.bit_count()
        self._covered |= new

    @property
    def value(self) -> int:
        return self._value


class TagCoverOracle(SubmodularOracle):
    """f(S) = number of distinct tags carried by the elements of S."""

    def __init__(self, tags: Sequence[Iterable], vocabulary: Sequence | None = None):
        self.n = len(tags)
        if vocabulary is None:
            seen: dict = {}
            for ts in tags:
                for t in ts:
                    seen.setdefault(t, len(seen))
            vocabulary = list(seen)
        self.vocabulary = list(vocabulary)
        index = {t: i for i, t in enumerate(self.vocabulary)}
        self.masks = []
        for ts in tags:
            m = 0
            for t in ts:
                if t not in index:
                    raise DatasetError(f"tag {t!r} not in vocabulary")
                m |= 1 << index[t]
            self.masks.append(m)
        self._tag_matrix = None

    def state(self) -> _TagState:
        return _TagState(self)

    def evaluate(self, members):
        st = self.state()
        for e in _ids(members):
            if not 0 <= e < self.n:
                raise DatasetError(f"unknown element id {e}")
            st.add(e)
        return st.value

    def _matrix(self) -> np.ndarray:
        if self._tag_matrix is None:
            v = len(self.vocabulary)
            m = np.zeros((self.n, v), dtype=np.uint8)
            for e, mask in enumerate(self.masks):
                for i in range(v):
                    if mask >> i & 1:
                        m[e, i] = 1
            self._tag_matrix = m
        return self._tag_matrix

    def evaluate_many(self, membership: np.ndarray) -> np.ndarray:
        covered = membership.astype(np.uint8) @ self._matrix() > 0
        return covered.sum(axis=1)

    def marginal_many(self, membership: np.ndarray, e: int) -> np.ndarray:
        covered = membership.astype(np.uint8) @ self._matrix() > 0
        row = self._matrix()[e].astype(bool)
        return (~covered & row).sum(axis=1)


class _CountingState(CoverState):
    __slots__ = ("_inner", "_owner")

    def __init__(self, inner: CoverState, owner: "CountingOracle"):
        self._inner = inner
        self._owner = owner

    def gain(self, e: int):
        self._owner._bump(marginal=1)
        return self._inner.gain(e)

    def add(self, e: int):
        self._inner.add(e)

    @property
    def value(self):
        return self._inner.value


class CountingOracle(SubmodularOracle):
    """Transparent wrapper that counts oracle queries.

    evaluate-style and marginal-style queries are tallied separately; the
    combined `queries` counter never decreases. Increments are lock-guarded so
    parallel samplers keep a correct total.
    """

    def __init__(self, inner: SubmodularOracle):
        self.inner = inner
        self.n = inner.n
        self._lock = threading.Lock()
        self.evaluate_queries = 0
        self.marginal_queries = 0

    @property
    def queries(self) -> int:
        return self.evaluate_queries + self.marginal_queries

    def _bump(self, evaluate: int = 0, marginal: int = 0):
        with self._lock:
            self.evaluate_queries += evaluate
            self.marginal_queries += marginal

    def evaluate(self, members):
        self._bump(evaluate=1)
        return self.inner.evaluate(members)

    def marginal(self, members, e: int):
        self._bump(marginal=1)
        return self.inner.marginal(members, e)

    def state(self) -> _CountingState:
        return _CountingState(self.inner.state(), self)

    def evaluate_many(self, membership: np.ndarray) -> np.ndarray:
        self._bump(evaluate=len(membership))
        return self.inner.evaluate_many(membership)

    def marginal_many(self, membership: np.ndarray, e: int) -> np.ndarray:
        self._bump(marginal=len(membership))
        return self.inner.marginal_many(membership, e)


@dataclass
class OracleReport:
    trials: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_oracle(oracle, n: int, trials: int, rng: np.random.Generator,
                    max_reported: int = 20) -> OracleReport:
    """Probe an oracle for monotonicity and diminishing returns.

    Samples random chains X <= Y <= U and an element x outside Y, then checks
    f(empty) == 0, nonnegativity, f(Y + x) >= f(Y), and
    marginal(X, x) >= marginal(Y, x). Shipped oracles must come back clean.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = OracleReport(trials=trials)

    def record(msg):
        if len(report.violations) < max_reported:
            report.violations.append(msg)

    if oracle.evaluate(()) != 0:
        record("f(empty) != 0")
    for t in range(trials):
        if n == 0:
            break
        y_mask = rng.random(n) < rng.random()
        x_choices = np.flatnonzero(~y_mask)
        if x_choices.size == 0:
            continue
        x = int(rng.choice(x_choices))
        keep = rng.random(n) < rng.random()
        x_mask = y_mask & keep
        X = np.flatnonzero(x_mask)
        Y = np.flatnonzero(y_mask)
        fy = oracle.evaluate(Y)
        if fy < 0:
            record(f"trial {t}: negative value f(Y) = {fy}")
        gain_y = oracle.marginal(Y, x)
        if gain_y < 0:
            record(f"trial {t}: monotonicity violated at Y + {x}")
        gain_x = oracle.marginal(X, x)
        if gain_x < gain_y:
            record(
                f"trial {t}: diminishing returns violated for x={x}: "
                f"gain at subset {gain_x} < gain at superset {gain_y}"
            )
    return report
