"""Solver dispatch shared by the command line and the HTTP service.

The margin lives in the problem spec; heuristic solvers receive the
margin-adjusted instance so that every solver answers the same question.
"""

from __future__ import annotations

import time
from typing import Optional

from .exact import SolveLimits, SolveReport, solve_bnb
from .greedy import greedy_budget, greedy_topk
from .model import Instance, PlanStatus, ProblemSpec, Variant, apply_margin
from .top1 import top1_exact

SOLVERS = ("exact", "greedy", "top1")


def solve(instance: Instance, spec: ProblemSpec, solver: str = "exact",
          limits: Optional[SolveLimits] = None) -> SolveReport:
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    spec.check(instance)
    if solver == "exact":
        return solve_bnb(instance, spec, limits)

    start = time.perf_counter()
    eff = apply_margin(instance, spec.margin) if spec.margin > 0 else instance
    if solver == "top1":
        if spec.variant is not Variant.TOPK or spec.k != 1:
            raise ValueError("the top1 solver only handles the k=1 guarantee")
        plan = top1_exact(eff, spec.keep_set)
        proved = plan.status is not PlanStatus.INFEASIBLE
        bound = float(eff.num_photos - len(plan.deleted)) if proved else float("-inf")
        return SolveReport(plan, proved, 0, bound, time.perf_counter() - start)

    if spec.variant is Variant.TOPK:
        plan = greedy_topk(eff, spec.k, spec.keep_set)
        bound = float(eff.num_photos)
    else:
        plan = greedy_budget(eff, spec.d, spec.keep_set)
        bound = float(eff.num_locations - 1)
    return SolveReport(plan, False, 0, bound, time.perf_counter() - start)
