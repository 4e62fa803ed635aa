"""Solvers for censoring photo collections against geolocation inference."""

from .exact import (
    SolveLimits,
    SolveReport,
    brute_force,
    location_bound,
    solve_bnb,
)
from .generators import (
    KnapsackReduction,
    gen_knapsack_reduction,
    gen_observation1,
    gen_proxy,
    gen_random,
    generate,
    knapsack_decision,
)
from .greedy import greedy_budget, greedy_topk
from .kernels import BACKEND as KERNEL_BACKEND
from .milp import LinearModel, LinearRow, build_milp, decode_solution, export_lp
from .model import (
    DeletionPlan,
    Instance,
    InvalidInstanceError,
    PlanStatus,
    ProblemSpec,
    ScoreKind,
    Variant,
    aggregate_scores,
    apply_margin,
    collection_posterior,
    higher_set,
    make_instance,
    make_plan,
    protected_k,
    validate_instance,
)
from .runner import solve
from .top1 import min_deletions_vs_location, top1_exact

__version__ = "0.1.0"

__all__ = [
    "DeletionPlan",
    "Instance",
    "InvalidInstanceError",
    "KERNEL_BACKEND",
    "KnapsackReduction",
    "LinearModel",
    "LinearRow",
    "PlanStatus",
    "ProblemSpec",
    "ScoreKind",
    "SolveLimits",
    "SolveReport",
    "Variant",
    "aggregate_scores",
    "apply_margin",
    "brute_force",
    "build_milp",
    "collection_posterior",
    "decode_solution",
    "export_lp",
    "gen_knapsack_reduction",
    "gen_observation1",
    "gen_proxy",
    "gen_random",
    "generate",
    "greedy_budget",
    "greedy_topk",
    "higher_set",
    "knapsack_decision",
    "location_bound",
    "make_instance",
    "make_plan",
    "min_deletions_vs_location",
    "protected_k",
    "solve",
    "solve_bnb",
    "top1_exact",
    "validate_instance",
]
