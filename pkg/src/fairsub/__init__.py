"""Fair submodular cover: fairness matroids, bicriteria maximization
subroutines (discrete and continuous), and cover converters, plus a
benchmark harness."""

from .continuous import (
    FractionalSolution,
    SamplePlan,
    continuous_threshold_greedy,
    decreasing_threshold,
    estimate_F,
    estimate_marginal,
    sample_count_subroutine,
    swap_round,
)
from .convert import (
    ConverterConfig,
    CoverResult,
    convert_continuous,
    convert_fair,
    fairness_repair,
    relaxed_fairness_flags,
    sample_count_gate,
)
from .discrete import FsmResult, greedy_bi, greedy_fairness_bi, threshold_fairness_bi
from .matroid import (
    ExchangeSequence,
    FairnessMatroid,
    beta_extension,
    build_exchange_sequence,
    can_add,
    is_member,
    rank,
    verify_exchange,
)
from .model import (
    FairnessFractions,
    FscInstance,
    PartitionedUniverse,
    Solution,
    as_fraction,
    fairness_difference,
    fsc_feasible,
)
from .oracles import CountingOracle, CoverageOracle, TagCoverOracle, validate_oracle

__all__ = [name for name in dir() if not name.startswith("_")]
