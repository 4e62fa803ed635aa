"""Exact polynomial-time solver for the top-1 guarantee.

For one alternate location the minimum deletion set is a prefix of the
photos sorted by descending score advantage of the true location; the
global answer is the best such prefix over all alternate locations.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .model import DeletionPlan, Instance, PlanStatus, make_plan


def _prefix_deletions(instance: Instance, j: int, keep: frozenset[int]) -> Optional[list[int]]:
    """Smallest deletion list making sum_kept(S^j - S^t) >= 0, or None if unreachable."""
    t = instance.true_location
    contrib = instance.scores[:, j] - instance.scores[:, t]
    pool = [i for i in range(instance.num_photos) if i not in keep]
    # descending advantage == ascending contribution; ties by ascending index
    pool.sort(key=lambda i: (contrib[i], i))
    max_deletions = len(pool) if keep else len(pool) - 1
    total = 0.0
    for i in range(instance.num_photos):  # ascending index, same order everywhere
        total += contrib[i]
    if total >= 0:
        return []
    removed: list[int] = []
    for i in pool[:max_deletions]:
        if contrib[i] >= 0:
            break  # removing non-negative contributions can never help
        total -= contrib[i]
        removed.append(i)
        if total >= 0:
            return removed
    return None


def min_deletions_vs_location(instance: Instance, j: int,
                              keep_set: Iterable[int] = ()) -> DeletionPlan:
    """Minimum deletions so location j scores at least as high as the true location."""
    if j == instance.true_location:
        raise ValueError("target location equals the true location")
    if not 0 <= j < instance.num_locations:
        raise ValueError(f"location index {j} out of range")
    keep = frozenset(int(i) for i in keep_set)
    removed = _prefix_deletions(instance, j, keep)
    if removed is None:
        return make_plan(instance, (), PlanStatus.INFEASIBLE)
    return make_plan(instance, removed, PlanStatus.FEASIBLE)


def top1_exact(instance: Instance, keep_set: Iterable[int] = ()) -> DeletionPlan:
    """Globally minimal deletion set achieving protected-k >= 1.

    Scans every alternate location; among locations tied on deletion
    count the lowest index wins. Runs in O(M N log N).
    """
    keep = frozenset(int(i) for i in keep_set)
    t = instance.true_location
    best: Optional[list[int]] = None
    for j in range(instance.num_locations):
        if j == t:
            continue
        removed = _prefix_deletions(instance, j, keep)
        if removed is not None and (best is None or len(removed) < len(best)):
            best = removed
            if not best:
                break  # zero deletions cannot be beaten
    if best is None:
        return make_plan(instance, (), PlanStatus.INFEASIBLE)
    return make_plan(instance, best, PlanStatus.OPTIMAL)
