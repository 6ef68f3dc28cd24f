"""Converters that turn fair-maximization subroutines into cover solvers.

Both converters guess the optimal cover size kappa on a geometric grid
(kappa_0 = ceil(1 + alpha), then kappa <- ceil((1 + alpha) * kappa)), run the
subroutine against the fairness matroid with integer bounds
(floor(p_c * kappa), ceil(q_c * kappa)), repair the returned set so its
per-color counts land between the scaled bounds at total size beta * kappa,
and accept the first guess whose (estimated) value clears the gate.

The guess sequence uses exact rational arithmetic: float rounding of
(1 + alpha) * kappa can overshoot the ceiling (e.g. 1.2 * 25) and silently
weaken the size guarantee.

Repair and the matroid are always built from the same guess; the guess is
advanced only after its gate fails. Every returned solution satisfies the
relaxed per-color inequality

    beta * floor(p_c * |S| / beta) <= |S inter U_c| <= beta * ceil(q_c * |S| / beta)

which `relaxed_fairness_flags` evaluates exactly, color by color.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .continuous import FractionalSolution, SamplePlan, estimate_F, swap_round
from .errors import InvariantError
from .matroid import FairnessMatroid, beta_extension
from .model import FscInstance, PartitionedUniverse, Solution, as_fraction
from .oracles import CountingOracle
from .rng import make_rng


class RepairShortfallWarning(UserWarning):
    """The universe could not supply beta*kappa elements under the caps."""


@dataclass(frozen=True)
class ConverterConfig:
    """Knobs for the guess loop and the subroutine's declared ratio.

    gamma/beta describe the subroutine's bicriteria quality (value factor and
    extension factor); alpha is the guess growth rate; epsilon/delta/scale
    parameterize the continuous gate.
    """

    alpha: float
    gamma: float
    beta: int
    epsilon: float = 0.1
    delta: float = 0.1
    max_kappa: int | None = None
    scale: int = 1

    def __post_init__(self):
        if as_fraction(self.alpha) <= 0:
            raise ValueError("alpha must be positive")
        if not 0 < as_fraction(self.gamma) <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.beta < 1:
            raise ValueError("beta must be a positive integer")


def kappa_guesses(alpha, max_kappa: int):
    """Geometric guess grid ceil(1+a), ceil((1+a)^2), ... capped at max_kappa."""
    growth = 1 + as_fraction(alpha)
    k = math.ceil(growth)
    while True:
        k = min(k, max_kappa)
        yield k
        if k >= max_kappa:
            return
        k = math.ceil(growth * k)


@dataclass
class GuessTrace:
    kappa: int
    value: float
    passed: bool
    queries: int
    repair_complete: bool = True


@dataclass
class CoverResult:
    solution: Solution
    kappa_final: int
    guesses_tried: int
    total_queries: int
    relaxed_fair: tuple[bool, ...]
    gate_passed: bool
    trace: list[GuessTrace] = field(default_factory=list)


def relaxed_fairness_flags(fractions, beta: int, solution: Solution) -> tuple[bool, ...]:
    """Per-color verdicts of the beta-relaxed share inequality, exactly."""
    size = len(solution)
    flags = []
    for c in range(fractions.num_colors):
        cnt = solution.count(c)
        lo = beta * math.floor(fractions.p[c] * size / beta)
        hi = beta * math.ceil(fractions.q[c] * size / beta)
        flags.append(lo <= cnt <= hi)
    return tuple(flags)


def fairness_repair(solution: Solution, universe: PartitionedUniverse,
                    lower_targets, upper_caps, total_target: int) -> Solution:
    """Two-phase fill: raise each color to its lower target, then sweep colors
    in index order topping the set up to total_target without passing any cap.
    Added elements are the lowest unused ids of their color. Warns (and
    returns the maximal repaired set) if the universe cannot supply enough
    elements under the caps."""
    for c in range(universe.num_colors):
        for e in universe.groups[c]:
            if solution.count(c) >= lower_targets[c]:
                break
            if e not in solution:
                solution.add(e)
    if len(solution) < total_target:
        for c in range(universe.num_colors):
            for e in universe.groups[c]:
                if len(solution) >= total_target or solution.count(c) >= upper_caps[c]:
                    break
                if e not in solution:
                    solution.add(e)
            if len(solution) >= total_target:
                break
    if len(solution) < total_target:
        warnings.warn(
            f"repair reached only {len(solution)} of {total_target} elements; "
            "the instance lacks group capacity for this guess",
            RepairShortfallWarning,
            stacklevel=2,
        )
    return solution


def _guess_matroid(instance: FscInstance, kappa: int) -> FairnessMatroid:
    lower = [math.floor(p * kappa) for p in instance.fractions.p]
    upper = [math.ceil(q * kappa) for q in instance.fractions.q]
    return FairnessMatroid(instance.universe, kappa, lower, upper)


def convert_fair(instance: FscInstance, subroutine, config: ConverterConfig
                 ) -> CoverResult:
    """Cover solver from a discrete subroutine.

    `subroutine(oracle, matroid) -> FsmResult` must return a set independent
    in the beta-scaled matroid with value at least gamma times the best
    matroid-feasible value. The first guess whose repaired solution reaches
    gamma * tau is returned; if the guess grid is exhausted the best solution
    seen comes back with gate_passed False.
    """
    counter = CountingOracle(instance.oracle)
    gamma = as_fraction(config.gamma)
    tau = as_fraction(instance.tau)
    bar = gamma * tau
    cap = config.max_kappa or instance.universe.n
    trace: list[GuessTrace] = []
    best = None  # (value, solution, kappa)

    for guesses, kappa in enumerate(kappa_guesses(config.alpha, cap), start=1):
        matroid = _guess_matroid(instance, kappa)
        before = counter.marginal_queries
        result = subroutine(counter, matroid)
        spent = counter.marginal_queries - before
        if result.beta_used != config.beta:
            raise InvariantError(
                f"subroutine used beta={result.beta_used}, config declares "
                f"{config.beta}"
            )
        beta = config.beta
        solution = result.solution
        with warnings.catch_warnings():
            # shortfalls at failing guesses are routine; only a returned
            # solution that falls short deserves the warning (re-raised below)
            warnings.simplefilter("ignore", RepairShortfallWarning)
            fairness_repair(
                solution,
                instance.universe,
                [beta * l for l in matroid.lower],
                [beta * u for u in matroid.upper],
                beta * kappa,
            )
        value = counter.evaluate(solution)
        passed = value >= bar
        trace.append(GuessTrace(kappa, float(value), passed,
                                spent, len(solution) == beta * kappa))
        if best is None or value > best[0]:
            best = (value, solution, kappa)
        if passed:
            if len(solution) != beta * kappa:
                warnings.warn(
                    f"returning a cover of {len(solution)} elements, short of "
                    f"the nominal {beta * kappa} (group capacity exhausted)",
                    RepairShortfallWarning,
                    stacklevel=2,
                )
            return CoverResult(
                solution=solution,
                kappa_final=kappa,
                guesses_tried=guesses,
                total_queries=sum(t.queries for t in trace),
                relaxed_fair=relaxed_fairness_flags(instance.fractions, beta, solution),
                gate_passed=True,
                trace=trace,
            )
    _, solution, kappa = best
    return CoverResult(
        solution=solution,
        kappa_final=kappa,
        guesses_tried=len(trace),
        total_queries=sum(t.queries for t in trace),
        relaxed_fair=relaxed_fairness_flags(instance.fractions, config.beta, solution),
        gate_passed=False,
        trace=trace,
    )


def sample_count_gate(n: int, epsilon, delta, scale: int = 1) -> int:
    """Sample count for the converter's value-estimate gate."""
    if n < 1 or scale < 1:
        raise ValueError("n and scale must be positive")
    eps = as_fraction(epsilon)
    dlt = as_fraction(delta)
    if not 0 < eps <= 1 or not 0 < dlt < 1:
        raise ValueError("need epsilon in (0,1] and delta in (0,1)")
    coefficient = Fraction(18 * n) / (eps * eps)
    log_arg = Fraction(4 * n) / dlt
    raw = float(coefficient) * math.log(float(log_arg)) / scale
    return max(1, math.ceil(raw))


def gate_threshold(gamma, epsilon, tau) -> Fraction:
    """Acceptance bar for the estimated multilinear value:
    ((1 - eps/2) * gamma - eps/3) * tau, exactly. Approaches gamma * tau as
    eps -> 0, collapsing to the discrete gate."""
    eps = as_fraction(epsilon)
    g = as_fraction(gamma)
    return ((1 - eps / 2) * g - eps / 3) * as_fraction(tau)


def convert_continuous(instance: FscInstance, subroutine,
                       config: ConverterConfig, plan: SamplePlan) -> CoverResult:
    """Cover solver from a continuous subroutine.

    `subroutine(oracle, matroid) -> FractionalSolution` must return a point in
    the beta-scaled matroid polytope (with its base decomposition). Since the
    multilinear value cannot be read exactly, each guess is gated on a
    Monte-Carlo estimate; a passing guess is swap-rounded and repaired.
    """
    counter = CountingOracle(instance.oracle)
    n = instance.universe.n
    eps = as_fraction(config.epsilon)
    bar = gate_threshold(config.gamma, eps, instance.tau)
    gate_samples = sample_count_gate(n, eps, config.delta, config.scale)
    cap = config.max_kappa or n
    beta = config.beta
    trace: list[GuessTrace] = []
    best = None  # (estimate, fractional, matroid, kappa)

    for guesses, kappa in enumerate(kappa_guesses(config.alpha, cap), start=1):
        matroid = _guess_matroid(instance, kappa)
        before = counter.marginal_queries
        fractional = subroutine(counter, matroid)
        spent = counter.marginal_queries - before
        if not isinstance(fractional, FractionalSolution):
            raise InvariantError("continuous subroutine must return a "
                                 "FractionalSolution with its decomposition")
        estimate = estimate_F(
            fractional, counter, gate_samples,
            make_rng(plan.rng_seed, 9_000_000 + guesses),
        )
        passed = estimate >= bar
        trace.append(GuessTrace(kappa, estimate, passed, spent))
        if best is None or estimate > best[0]:
            best = (estimate, fractional, matroid, kappa)
        if passed:
            return _finish_continuous(
                instance, counter, fractional, matroid, kappa, beta,
                plan, guesses, trace, gate_passed=True,
            )
    _, fractional, matroid, kappa = best
    return _finish_continuous(
        instance, counter, fractional, matroid, kappa, beta,
        plan, len(trace), trace, gate_passed=False,
    )


def _finish_continuous(instance, counter, fractional, matroid, kappa, beta,
                       plan, guesses, trace, *, gate_passed):
    scaled = beta_extension(matroid, beta)
    solution = swap_round(
        fractional, scaled, make_rng(plan.rng_seed, 8_000_000 + guesses)
    )
    fairness_repair(
        solution,
        instance.universe,
        [math.floor(p * beta * kappa) for p in instance.fractions.p],
        [math.ceil(q * beta * kappa) for q in instance.fractions.q],
        beta * kappa,
    )  # a shortfall here is the real thing; let the warning propagate
    return CoverResult(
        solution=solution,
        kappa_final=kappa,
        guesses_tried=guesses,
        total_queries=sum(t.queries for t in trace),
        relaxed_fair=relaxed_fairness_flags(instance.fractions, beta, solution),
        gate_passed=gate_passed,
        trace=trace,
    )
