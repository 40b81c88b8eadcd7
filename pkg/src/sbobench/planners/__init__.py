"""Optimizing sampling-based planners behind one call signature.

Every planner is ``plan(problem, budget, params=None, rng=None) -> PlannerResult``.
"""

from .base import (
    Budget,
    BudgetMode,
    InvalidProblemError,
    Path,
    PlannerParams,
    PlannerResult,
    Problem,
    SharedBest,
    Status,
)
from .common import (
    NearestIndex,
    informed_sample,
    path_cost,
    prm_star_k,
    rewiring_radius,
    rrt_star_gamma,
    segment_costs,
)
from .ensemble import plan_aps, plan_cforest
from .fmt import plan_fmt_star
from .prm import plan_lazy_prm_star, plan_prm_star
from .rrtstar import TreeEngine, plan_informed_rrt_star, plan_rrt, plan_rrt_star
from .simplify import interpolate_path, shortcut_simplify

PLANNERS = {
    "RRTstar": plan_rrt_star,
    "PRMstar": plan_prm_star,
    "LazyPRMstar": plan_lazy_prm_star,
    "InformedRRTstar": plan_informed_rrt_star,
    "FMTstar": plan_fmt_star,
    "CForest": plan_cforest,
    "APS": plan_aps,
}

ALIASES = {
    "RRT*": "RRTstar",
    "RRTSTAR": "RRTstar",
    "PRM*": "PRMstar",
    "PRMSTAR": "PRMstar",
    "LAZYPRM*": "LazyPRMstar",
    "LAZYPRMSTAR": "LazyPRMstar",
    "INFORMEDRRT*": "InformedRRTstar",
    "INFORMEDRRTSTAR": "InformedRRTstar",
    "FMT*": "FMTstar",
    "FMTSTAR": "FMTstar",
    "FMT": "FMTstar",
    "CFOREST": "CForest",
    "APS": "APS",
    "ANYTIMEPATHSHORTENING": "APS",
}


def canonical_planner_name(name: str) -> str:
    """Map a user-facing planner name to its registry key; KeyError if unknown."""
    key = name.strip()
    if key in PLANNERS:
        return key
    try:
        return ALIASES[key.upper()]
    except KeyError:
        raise KeyError(f"unknown planner {name!r}; available: {', '.join(PLANNERS)}") from None


def get_planner(name: str):
    return PLANNERS[canonical_planner_name(name)]


__all__ = [
    "ALIASES",
    "PLANNERS",
    "Budget",
    "BudgetMode",
    "InvalidProblemError",
    "NearestIndex",
    "Path",
    "PlannerParams",
    "PlannerResult",
    "Problem",
    "SharedBest",
    "Status",
    "TreeEngine",
    "canonical_planner_name",
    "get_planner",
    "informed_sample",
    "interpolate_path",
    "path_cost",
    "plan_aps",
    "plan_cforest",
    "plan_fmt_star",
    "plan_informed_rrt_star",
    "plan_lazy_prm_star",
    "plan_prm_star",
    "plan_rrt",
    "plan_rrt_star",
    "prm_star_k",
    "rewiring_radius",
    "rrt_star_gamma",
    "segment_costs",
    "shortcut_simplify",
]
