"""Discrete bicriteria subroutines for fair submodular maximization.

All three algorithms break marginal-gain ties deterministically toward the
lowest element id, so runs are bit-reproducible. `greedy_bi` is the
fairness-blind cover baseline; the other two respect a fairness matroid
scaled by beta = ceil(1/epsilon):

  greedy_fairness_bi     value within (1 - eps) of the best matroid-feasible
                         set, at most n * beta * kappa marginal queries;
  threshold_fairness_bi  value within (1 - 2*eps), with a descending
                         threshold schedule that needs only
                         O(n/eps * log(kappa/eps)) marginal queries.

Both return sets independent in the scaled matroid; when the scaled budget is
attainable the greedy variant fills it exactly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import InfeasibleThresholdError
from .matroid import FairnessMatroid, IndependenceTracker, beta_extension
from .model import PartitionedUniverse, Solution, as_fraction
from .oracles import CountingOracle


@dataclass
class FsmResult:
    solution: Solution
    queries: int
    beta_used: int
    epsilon: float


def beta_for_epsilon(epsilon) -> int:
    eps = as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    return math.ceil(1 / eps)


def _lazy_argmax_loop(n, state, can_add, on_select, keep_going):
    """Shared stale-heap greedy: repeatedly select the feasible element of
    maximum marginal gain (lowest id on ties) until no element is addable or
    keep_going() turns false.

    Heap entries carry the solution size at evaluation time; a popped entry is
    trusted only if evaluated against the current solution, otherwise it is
    re-evaluated and pushed back. Submodularity makes stale gains upper
    bounds, so the first fresh pop is the true argmax. Infeasible pops are
    dropped permanently (independence is hereditary: what cannot extend S
    cannot extend any superset).
    """
    heap = []
    for x in range(n):
        if can_add(x):
            heap.append((-state.gain(x), x, 0))
    heapq.heapify(heap)
    size = 0
    while keep_going() and heap:
        neg_gain, x, stamp = heapq.heappop(heap)
        if not can_add(x):
            continue
        if stamp == size:
            on_select(x, -neg_gain)
            size += 1
        else:
            heapq.heappush(heap, (-state.gain(x), x, size))


def greedy_bi(oracle, universe: PartitionedUniverse, tau, epsilon, *,
              lazy: bool = True) -> Solution:
    """Fairness-blind greedy cover: add the best element until f(S) clears
    (1 - epsilon) * tau. Raises if the universe runs out first."""
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    solution = Solution(universe)
    if as_fraction(tau) <= 0:
        return solution  # the empty set already covers a zero threshold
    stop_below = (1 - eps) * as_fraction(tau)
    state = oracle.state()

    if lazy:
        def on_select(x, gain):
            state.add(x)
            solution.add(x)

        _lazy_argmax_loop(
            universe.n,
            state,
            can_add=lambda x: x not in solution,
            on_select=on_select,
            keep_going=lambda: state.value <= stop_below,
        )
    else:
        while state.value <= stop_below:
            best = None
            for x in universe.elements():
                if x in solution:
                    continue
                g = state.gain(x)
                if best is None or g > best[0]:
                    best = (g, x)
            if best is None:
                break
            state.add(best[1])
            solution.add(best[1])
    if state.value <= stop_below:
        raise InfeasibleThresholdError(
            f"all {universe.n} elements reach only f = {state.value} <= "
            f"(1 - eps) * tau = {float(stop_below)}"
        )
    return solution


def greedy_fairness_bi(oracle, matroid: FairnessMatroid, epsilon, *,
                       lazy: bool = True) -> FsmResult:
    """Greedy over the beta-scaled matroid, beta = ceil(1/epsilon).

    Keeps adding the feasible element of maximum marginal gain until nothing
    is addable, so the output is a maximal independent set of the scaled
    matroid (its full budget when attainable). The lazy path is an
    accelerated evaluation order that returns the identical solution.
    """
    beta = beta_for_epsilon(epsilon)
    scaled = beta_extension(matroid, beta)
    counter = CountingOracle(oracle)
    state = counter.state()
    tracker = IndependenceTracker(scaled)
    solution = Solution(matroid.universe)

    def select(x):
        tracker.add(x)
        state.add(x)
        solution.add(x)

    if lazy:
        _lazy_argmax_loop(
            matroid.universe.n,
            state,
            can_add=tracker.can_add,
            on_select=lambda x, gain: select(x),
            keep_going=lambda: True,
        )
    else:
        while True:
            best = None
            for x in matroid.universe.elements():
                if not tracker.can_add(x):
                    continue
                g = state.gain(x)
                if best is None or g > best[0]:
                    best = (g, x)
            if best is None:
                break
            select(best[1])
    return FsmResult(
        solution=solution,
        queries=counter.marginal_queries,
        beta_used=beta,
        epsilon=float(epsilon),
    )


def threshold_fairness_bi(oracle, matroid: FairnessMatroid, epsilon) -> FsmResult:
    """Descending-threshold greedy over the beta-scaled matroid.

    The threshold starts at the best feasible singleton value d and decays by
    (1 - epsilon) per pass while it stays above eps * d / kappa (strict).
    Each pass sweeps the universe in id order and commits every feasible
    element whose marginal meets the current threshold; the sweep returns
    early once the scaled budget is full.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    beta = beta_for_epsilon(eps)
    scaled = beta_extension(matroid, beta)
    counter = CountingOracle(oracle)
    state = counter.state()
    tracker = IndependenceTracker(scaled)
    solution = Solution(matroid.universe)

    def result():
        return FsmResult(
            solution=solution,
            queries=counter.marginal_queries,
            beta_used=beta,
            epsilon=float(epsilon),
        )

    d = None
    for x in matroid.universe.elements():
        if tracker.can_add(x):
            g = state.gain(x)
            if d is None or g > d:
                d = g
    if d is None or d <= 0 or matroid.kappa == 0:
        return result()

    budget = scaled.kappa
    cutoff = float(eps * as_fraction(d) / matroid.kappa)
    w = float(d)
    while w > cutoff:
        for x in matroid.universe.elements():
            if not tracker.can_add(x):
                continue
            if state.gain(x) >= w:
                tracker.add(x)
                state.add(x)
                solution.add(x)
                if len(solution) == budget:
                    return result()
        w *= 1 - float(eps)
    return result()
