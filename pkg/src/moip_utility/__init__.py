"""Exact minimisation of a monotone utility over the efficient set of a MOIP."""

from .model import (
    NEG_INF,
    POS_INF,
    BoundsState,
    MoipInstance,
    dominates,
    evaluate_objectives,
    filter_nondominated,
)
from .utility import UtilityExpr, parse_utility
from .driver import RunConfig, RunResult, run, run_naive

__all__ = [
    "NEG_INF",
    "POS_INF",
    "BoundsState",
    "MoipInstance",
    "RunConfig",
    "RunResult",
    "UtilityExpr",
    "dominates",
    "evaluate_objectives",
    "filter_nondominated",
    "parse_utility",
    "run",
    "run_naive",
]
