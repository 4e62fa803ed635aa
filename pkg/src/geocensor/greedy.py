"""Greedy deletion baselines: highest true-location score first.

Both variants delete photos in strictly decreasing order of the
true-location score, ties broken by ascending photo index, skipping
pinned photos. They serve as comparison anchors and as warm-start
incumbents for the exact solver.
"""

from __future__ import annotations

from typing import Iterable

from .model import DeletionPlan, Instance, PlanStatus, make_plan, protected_k


def deletion_order(instance: Instance, keep_set: Iterable[int] = ()) -> list[int]:
    """Deletable photos sorted by descending true-location score, index ascending on ties."""
    keep = frozenset(keep_set)
    st = instance.scores[:, instance.true_location]
    pool = [i for i in range(instance.num_photos) if i not in keep]
    return sorted(pool, key=lambda i: (-st[i], i))


def greedy_topk(instance: Instance, k: int, keep_set: Iterable[int] = ()) -> DeletionPlan:
    """Delete highest-S^t photos until the true location leaves the top k."""
    if not 1 <= k <= instance.num_locations - 1:
        raise ValueError(f"k={k} outside [1, {instance.num_locations - 1}]")
    keep = frozenset(int(i) for i in keep_set)
    order = deletion_order(instance, keep)
    deleted: list[int] = []
    if protected_k(instance, range(instance.num_photos)) >= k:
        return make_plan(instance, (), PlanStatus.FEASIBLE)
    # one photo must always remain
    max_deletions = len(order) if keep else len(order) - 1
    for i in order[:max_deletions]:
        deleted.append(i)
        kept = set(range(instance.num_photos)) - set(deleted)
        if protected_k(instance, kept) >= k:
            return make_plan(instance, deleted, PlanStatus.FEASIBLE)
    return make_plan(instance, (), PlanStatus.INFEASIBLE)


def greedy_budget(instance: Instance, d: int, keep_set: Iterable[int] = ()) -> DeletionPlan:
    """Delete the d highest-S^t deletable photos and report the resulting protected-k."""
    if not 0 <= d <= instance.num_photos - 1:
        raise ValueError(f"d={d} outside [0, {instance.num_photos - 1}]")
    keep = frozenset(int(i) for i in keep_set)
    order = deletion_order(instance, keep)
    max_deletions = len(order) if keep else len(order) - 1
    deleted = order[: min(d, max_deletions)]
    return make_plan(instance, deleted, PlanStatus.FEASIBLE)
