"""Preference-based black-box optimization from Likert-scale pairwise
comparisons, with a benchmark harness and an interactive session service."""

from .benchmarks import BENCHMARKS, BenchmarkFunction, eval_benchmark, get_benchmark
from .engine import (
    MODE_AMPL,
    MODE_APL_RBF,
    Engine,
    EngineConfig,
    PreferenceQuery,
    TrialLog,
    init_engine,
    run_loop,
)
from .oracle import OracleConfig, SyntheticDecisionMaker, make_query_oracle, true_likert
from .preferences import (
    Outcome,
    OutcomeSet,
    PreferenceRecord,
    bounds_for_level,
    record_weights,
    validate_outcome_set,
)
from .problem import (
    ProblemSpec,
    ValidatedProblem,
    is_feasible,
    scale_point,
    unscale_point,
    validate_problem,
)
from .surrogate import SurrogateModel, cross_validate_gamma, fit_surrogate, surrogate_eval

__version__ = "0.1.0"

__all__ = [
    "BENCHMARKS",
    "BenchmarkFunction",
    "Engine",
    "EngineConfig",
    "MODE_AMPL",
    "MODE_APL_RBF",
    "OracleConfig",
    "Outcome",
    "OutcomeSet",
    "PreferenceQuery",
    "PreferenceRecord",
    "ProblemSpec",
    "SurrogateModel",
    "SyntheticDecisionMaker",
    "TrialLog",
    "ValidatedProblem",
    "bounds_for_level",
    "cross_validate_gamma",
    "eval_benchmark",
    "fit_surrogate",
    "get_benchmark",
    "init_engine",
    "is_feasible",
    "make_query_oracle",
    "record_weights",
    "run_loop",
    "scale_point",
    "surrogate_eval",
    "true_likert",
    "unscale_point",
    "validate_outcome_set",
    "validate_problem",
]
