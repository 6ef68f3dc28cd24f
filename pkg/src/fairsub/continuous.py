"""Continuous threshold greedy over the matroid polytope.

The fractional solver advances a point x in steps of size epsilon along
indicator directions chosen by a decreasing-threshold subroutine. Marginals
against the random-set distribution S(x) (include i with probability x_i) are
Monte-Carlo estimates averaged over a Chernoff-sized number of samples; the
default sample count

    ceil( (3*kappa/eps^2) * ln(4*n^4/eps^3) / scale )

is divided by a desk-scale factor `scale` because the full count is far more
conservative than small benchmark instances need (acceptance checks pin the
claims that must run at scale = 1).

The returned point carries its construction as an explicit list of
(step, base) pairs. That list is the polytope-membership certificate and the
input to swap rounding, which merges the weighted bases pairwise by random
matroid exchanges until a single independent set remains. Coordinates are
never clipped: an element whose coordinate has grown past 1 - eps is simply
withheld from later bases, so x stays inside the unit cube by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .matroid import (
    FairnessMatroid,
    IndependenceTracker,
    beta_extension,
    is_member,
    symmetric_exchange,
)
from .model import Solution, as_fraction
from .rng import make_rng


def sample_count_subroutine(n: int, kappa: int, epsilon, scale: int = 1) -> int:
    """Per-estimate sample count for threshold-subroutine marginals."""
    if n < 1 or kappa < 1 or scale < 1:
        raise ValueError("n, kappa and scale must be positive")
    eps = as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    coefficient = Fraction(3 * kappa) / (eps * eps)
    log_arg = Fraction(4 * n**4) / (eps**3)
    raw = float(coefficient) * math.log(float(log_arg)) / scale
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class SamplePlan:
    """How many Monte-Carlo samples each estimate gets, and from which seed."""

    per_estimate_samples: int
    rng_seed: int
    scale: int = 1

    def __post_init__(self):
        if self.per_estimate_samples < 1:
            raise ValueError("per_estimate_samples must be >= 1")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")

    @classmethod
    def for_instance(cls, n: int, kappa: int, epsilon, rng_seed: int,
                     scale: int = 1) -> "SamplePlan":
        return cls(
            per_estimate_samples=sample_count_subroutine(n, kappa, epsilon, scale),
            rng_seed=rng_seed,
            scale=scale,
        )


@dataclass(frozen=True)
class FractionalSolution:
    """Point in [0,1]^n together with its base decomposition.

    The coordinates satisfy x = sum of step * indicator(base) over the listed
    bases, reproducible exactly by `recompute` (same summation order)."""

    x: np.ndarray
    bases: tuple[tuple[float, frozenset[int]], ...]

    def recompute(self) -> np.ndarray:
        vec = np.zeros_like(self.x)
        for step, base in self.bases:
            for e in base:
                vec[e] += step
        return vec


def _coordinates(x) -> np.ndarray:
    if isinstance(x, FractionalSolution):
        return x.x
    return np.asarray(x, dtype=float)


def sample_sets(x, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Boolean membership matrix: `samples` independent draws of S(x)."""
    vec = _coordinates(x)
    return rng.random((samples, vec.size)) < vec


def estimate_F(x, oracle, samples: int, rng: np.random.Generator) -> float:
    """Monte-Carlo mean of f over random sets S(x); deterministic per rng."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    membership = sample_sets(x, samples, rng)
    values = oracle.evaluate_many(membership)
    return float(np.mean(values))


def estimate_marginal(x, B, u: int, epsilon, oracle, samples: int,
                      rng: np.random.Generator) -> float:
    """Monte-Carlo mean of the marginal of u against S(x + eps * 1_B).

    u must lie outside B and the shifted point must stay within the unit
    cube. Draws where u is already present contribute a zero marginal.
    """
    if u in B:
        raise ValueError("u must not belong to the direction set B")
    vec = _coordinates(x).copy()
    eps = float(epsilon)
    for e in B:
        vec[e] += eps
    if np.any(vec > 1 + 1e-9):
        raise ValueError("shifted coordinates exceed 1")
    np.minimum(vec, 1.0, out=vec)
    membership = rng.random((samples, vec.size)) < vec
    gains = oracle.marginal_many(membership, u)
    return float(np.mean(gains))


def beta_continuous(epsilon) -> int:
    """Integer extension factor ceil(ln(1/eps) + 1) used by the subroutine."""
    eps = as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    return math.ceil(math.log(float(1 / eps)) + 1)


def decreasing_threshold(x, oracle, matroid: FairnessMatroid, epsilon, d,
                         plan: SamplePlan, *, excluded=frozenset(),
                         stream: tuple[int, ...] = (0,)) -> set[int]:
    """One direction-finding pass: collect a set feasible for the
    ceil(ln(1/eps)+1)-scaled matroid by sweeping thresholds from d downward.

    Each candidate's estimated marginal against S(x + eps * 1_B) is compared
    to the current threshold w; thresholds decay by (1 - eps) per sweep while
    w > eps * d / kappa. `excluded` removes near-saturated coordinates from
    candidacy. Estimates draw from per-estimate substreams of the plan seed,
    so the pass is reproducible.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    scaled = beta_extension(matroid, beta_continuous(eps))
    tracker = IndependenceTracker(scaled)
    chosen: set[int] = set()
    if d <= 0 or matroid.kappa == 0:
        return chosen
    n = matroid.universe.n
    cutoff = float(eps * as_fraction(d) / matroid.kappa)
    w = float(d)
    estimate_index = 0
    while w > cutoff:
        for u in range(n):
            if u in excluded or not tracker.can_add(u):
                continue
            est_rng = make_rng(plan.rng_seed, *stream, estimate_index)
            estimate_index += 1
            est = estimate_marginal(
                x, chosen, u, float(eps), oracle, plan.per_estimate_samples, est_rng
            )
            if est >= w:
                tracker.add(u)
                chosen.add(u)
        w *= 1 - float(eps)
    return chosen


def continuous_threshold_greedy(oracle, matroid: FairnessMatroid, epsilon,
                                delta, plan: SamplePlan) -> FractionalSolution:
    """Fractional solver: ceil(1/eps) steps of size eps along subroutine
    directions, returning the point plus its base decomposition.

    `delta` is carried for interface parity with the surrounding gate logic;
    the subroutine's own estimate accuracy is fixed by the sample plan.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    del delta
    universe = matroid.universe
    eps_f = float(eps)

    d = 0
    probe = IndependenceTracker(matroid)
    state = oracle.state()
    for e in universe.elements():
        if probe.can_add(e):
            d = max(d, state.gain(e))

    x = np.zeros(universe.n, dtype=float)
    bases: list[tuple[float, frozenset[int]]] = []
    iterations = math.ceil(1 / eps)
    for t in range(iterations):
        saturated = {int(i) for i in np.flatnonzero(x > 1 - eps_f)}
        chosen = decreasing_threshold(
            x, oracle, matroid, eps, d, plan, excluded=saturated, stream=(t,)
        )
        bases.append((eps_f, frozenset(chosen)))
        for e in chosen:
            x[e] += eps_f
    return FractionalSolution(x=x, bases=tuple(bases))


def swap_round(fractional: FractionalSolution, scaled: FairnessMatroid,
               rng: np.random.Generator) -> Solution:
    """Round a decomposed point to an independent set of the scaled matroid.

    The weighted bases are padded with dummy ids to the scaled budget and
    merged pairwise: while two bases differ, a random matroid exchange moves
    one element across, keeping both sets bases. The surviving base (dummies
    stripped) is always independent; over the randomness its expected value
    dominates the multilinear value of the point.
    """
    if not fractional.bases:
        raise ValueError("fractional solution carries no base decomposition")
    universe = scaled.universe
    cap = scaled.kappa
    for _, base in fractional.bases:
        if not is_member(scaled, base):
            raise ValueError("decomposition contains a dependent base")
        if len(base) > cap:
            raise ValueError("base exceeds the scaled budget")

    def padded(base: frozenset[int]) -> frozenset[int]:
        deficit = cap - len(base)
        return base | frozenset(range(universe.n, universe.n + deficit))

    weight, current = fractional.bases[0]
    current = padded(current)
    for step, base in fractional.bases[1:]:
        other = padded(base)
        while current != other:
            leaving = min(current - other)
            arriving = symmetric_exchange(scaled, cap, current, other, leaving)
            if rng.random() < weight / (weight + step):
                other = (other - {arriving}) | {leaving}
            else:
                current = (current - {leaving}) | {arriving}
        weight += step
    return Solution(universe, (e for e in current if e < universe.n))
