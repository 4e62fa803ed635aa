"""Exact optimization: brute-force oracle and branch-and-bound search.

The search branches on keep/delete decisions for photos in a fixed order
(most rank-decisive photo first, delete branch first) and prunes with a
per-location relaxation: for every alternate location, the minimum number
of free-photo removals that lifts it above the true location, computed by
removing the most negative contributions first. Incumbent decisions are
always re-validated against the core model, so kernel arithmetic can
never change a reported plan.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .greedy import greedy_budget, greedy_topk
from .model import (
    DeletionPlan,
    Instance,
    PlanStatus,
    ProblemSpec,
    Variant,
    apply_margin,
    make_plan,
    protected_k,
)
from .top1 import top1_exact

BRUTE_FORCE_MAX_PHOTOS = 20


@dataclass(frozen=True)
class SolveLimits:
    node_cap: int = 10_000_000
    time_cap: float = 300.0
    trace: bool = False

    def check(self) -> None:
        if self.node_cap <= 0:
            raise ValueError("node_cap must be positive")
        if self.time_cap <= 0:
            raise ValueError("time_cap must be positive")


@dataclass
class SolveReport:
    plan: DeletionPlan
    proved_optimal: bool
    nodes_explored: int
    best_bound: float
    wall_time: float
    bound_trace: Optional[list[tuple[int, float]]] = None

    def objective(self, spec: ProblemSpec) -> Optional[int]:
        """Comparable objective: deletions (topk, None if unsatisfied) or protected-k."""
        if spec.variant is Variant.TOPK:
            if self.plan.protected_k < spec.k:
                return None
            return len(self.plan.deleted)
        return self.plan.protected_k

    def to_json_dict(self, instance: Instance) -> dict:
        out = {
            "plan": self.plan.to_json_dict(instance),
            "proved_optimal": self.proved_optimal,
            "nodes_explored": self.nodes_explored,
            "best_bound": self.best_bound,
        }
        if self.bound_trace is not None:
            out["bound_trace"] = [[n, b] for n, b in self.bound_trace]
        return out


def _effective(instance: Instance, spec: ProblemSpec) -> Instance:
    return apply_margin(instance, spec.margin) if spec.margin > 0 else instance


def _max_deletions(pool_size: int, has_forced_kept: bool) -> int:
    # at least one photo must survive every plan
    return pool_size if has_forced_kept else pool_size - 1


def brute_force(instance: Instance, spec: ProblemSpec) -> SolveReport:
    """Exhaustive oracle over all kept supersets of the keep set.

    Deletion subsets are visited size-ascending then lexicographically,
    which fixes every tie: topk returns the first feasible subset, budget
    keeps the first subset attaining each protected-k value.
    """
    if instance.num_photos > BRUTE_FORCE_MAX_PHOTOS:
        raise ValueError(
            f"brute force refuses N={instance.num_photos} > {BRUTE_FORCE_MAX_PHOTOS}")
    spec.check(instance)
    start = time.perf_counter()
    eff = _effective(instance, spec)
    keep = spec.keep_set
    pool = sorted(set(range(eff.num_photos)) - keep)
    max_del = _max_deletions(len(pool), bool(keep))
    if spec.variant is Variant.BUDGET:
        max_del = min(max_del, spec.d)
    everything = set(range(eff.num_photos))

    evaluated = 0
    if spec.variant is Variant.TOPK:
        for size in range(max_del + 1):
            for combo in itertools.combinations(pool, size):
                evaluated += 1
                if protected_k(eff, everything - set(combo)) >= spec.k:
                    plan = make_plan(eff, combo, PlanStatus.OPTIMAL)
                    return SolveReport(plan, True, evaluated,
                                       float(eff.num_photos - size),
                                       time.perf_counter() - start)
        plan = make_plan(eff, (), PlanStatus.INFEASIBLE)
        return SolveReport(plan, True, evaluated, float("-inf"),
                           time.perf_counter() - start)

    best_combo: tuple[int, ...] = ()
    best_pk = -1
    for size in range(max_del + 1):
        for combo in itertools.combinations(pool, size):
            evaluated += 1
            pk = protected_k(eff, everything - set(combo))
            if pk > best_pk:
                best_pk, best_combo = pk, combo
    plan = make_plan(eff, best_combo, PlanStatus.OPTIMAL)
    return SolveReport(plan, True, evaluated, float(best_pk),
                       time.perf_counter() - start)


def _contrib_and_order(eff: Instance) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Per-alternate-location contribution rows and their ascending sort orders."""
    t = eff.true_location
    alt = [j for j in range(eff.num_locations) if j != t]
    contrib = np.ascontiguousarray(
        (eff.scores[:, alt] - eff.scores[:, [t]]).T, dtype=np.float64)
    order = np.ascontiguousarray(
        np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
    return contrib, order, alt


def location_bound(instance: Instance, forced_kept: Iterable[int],
                   forced_deleted: Iterable[int], remaining_budget: int,
                   theta: float = 0.0) -> int:
    """Upper bound on protected-k over completions deleting at most
    remaining_budget free photos; the per-location tests are independent."""
    kept = frozenset(int(i) for i in forced_kept)
    deleted = frozenset(int(i) for i in forced_deleted)
    if kept & deleted:
        raise ValueError("forced_kept and forced_deleted overlap")
    eff = apply_margin(instance, theta) if theta > 0 else instance
    contrib, order, _ = _contrib_and_order(eff)
    state = np.zeros(eff.num_photos, dtype=np.uint8)
    state[list(kept)] = kernels.KEPT
    state[list(deleted)] = kernels.DELETED
    cap = max(int(remaining_budget), 0)
    m, _ = kernels.min_free_deletions(contrib, order, state, cap)
    return int((m <= cap).sum())


class _Incumbent:
    __slots__ = ("deleted", "value")

    def __init__(self):
        self.deleted: Optional[frozenset[int]] = None
        self.value: Optional[int] = None

    def set(self, deleted: Iterable[int], value: int) -> None:
        self.deleted, self.value = frozenset(deleted), value


def solve_bnb(instance: Instance, spec: ProblemSpec,
              limits: Optional[SolveLimits] = None) -> SolveReport:
    """Best-first branch-and-bound over keep/delete assignments.

    Deterministic: node order is a total order on (bound, depth, creation
    id) and only strictly better incumbents replace the current one, so
    the first plan found at the optimal value is the one returned.
    """
    limits = limits or SolveLimits()
    limits.check()
    spec.check(instance)
    start = time.perf_counter()
    eff = _effective(instance, spec)
    n = eff.num_photos
    t = eff.true_location
    contrib, order, _ = _contrib_and_order(eff)
    topk = spec.variant is Variant.TOPK

    keep = set(spec.keep_set)
    # photos lifting every alternate location are never worth deleting
    dominated = {i for i in range(n)
                 if i not in keep and float(contrib[:, i].min()) >= 0.0}
    forced_kept = keep | dominated
    pool = [i for i in range(n) if i not in forced_kept]
    rival = np.delete(eff.scores, t, axis=1).max(axis=1)
    decisive = np.abs(eff.scores[:, t] - rival)
    pool.sort(key=lambda i: (-decisive[i], i))
    max_del_total = _max_deletions(len(pool), bool(forced_kept))
    if not topk:
        max_del_total = min(max_del_total, spec.d)

    base_state = np.zeros(n, dtype=np.uint8)
    for i in forced_kept:
        base_state[i] = kernels.KEPT

    inc = _Incumbent()

    # warm starts
    if topk:
        g = greedy_topk(eff, spec.k, keep)
        if g.status is not PlanStatus.INFEASIBLE:
            inc.set(g.deleted, len(g.deleted))
        if spec.k == 1:
            t1 = top1_exact(eff, keep)
            if t1.status is not PlanStatus.INFEASIBLE and (
                    inc.value is None or len(t1.deleted) < inc.value):
                inc.set(t1.deleted, len(t1.deleted))
    else:
        g = greedy_budget(eff, spec.d, keep)
        inc.set(g.deleted, g.protected_k)

    everything = frozenset(range(n))
    root_pk = protected_k(eff, everything)
    if topk and root_pk >= spec.k:
        plan = make_plan(eff, (), PlanStatus.OPTIMAL)
        return SolveReport(plan, True, 0, float(n), time.perf_counter() - start)
    if not topk and root_pk > inc.value:
        inc.set(frozenset(), root_pk)

    def canonical_pk(deleted: Iterable[int]) -> int:
        return protected_k(eff, everything - frozenset(deleted))

    def try_incumbent(deleted: frozenset[int] | set[int]) -> None:
        nd = len(deleted)
        if nd > max_del_total:
            return
        if topk:
            if inc.value is not None and nd >= inc.value:
                return
            if canonical_pk(deleted) >= spec.k:
                inc.set(deleted, nd)
        else:
            pk = canonical_pk(deleted)
            if inc.value is None or pk > inc.value:
                inc.set(deleted, pk)

    probe_out = np.empty(n, dtype=np.int32)
    probed: set[frozenset[int]] = set()

    def probe(state: np.ndarray, deleted: set[int], m: np.ndarray,
              totals: np.ndarray, cap: int) -> None:
        """Join the cheapest per-location removal prefixes into one candidate."""
        usable = np.nonzero((m > 0) & (m <= cap))[0]
        if not usable.size:
            return
        ranked = usable[np.argsort(m[usable], kind="stable")].astype(np.int32)
        take = min(spec.k, len(ranked)) if topk else len(ranked)
        budget_left = -1 if topk else spec.d - len(deleted)
        cnt = kernels.probe_union(contrib, order, state, totals, ranked,
                                  take, budget_left, probe_out)
        if not cnt:
            return
        candidate = frozenset(deleted.union(probe_out[:cnt].tolist()))
        if candidate in probed:
            return
        probed.add(candidate)
        try_incumbent(candidate)

    heap: list[tuple] = []
    trace: Optional[list[tuple[int, float]]] = [] if limits.trace else None
    next_id = itertools.count()
    nodes = 0
    depth_total = len(pool)

    def node_state(depth: int, mask: int) -> np.ndarray:
        state = base_state.copy()
        for b in range(depth):
            state[pool[b]] = kernels.DELETED if (mask >> b) & 1 else kernels.KEPT
        return state

    def evaluate(depth: int, mask: int, ndel: int) -> Optional[tuple]:
        """Bound a node; may update the incumbent. Returns a heap entry or None."""
        state = node_state(depth, mask)
        deleted = {pool[b] for b in range(depth) if (mask >> b) & 1}
        if topk:
            cap = max_del_total - ndel
            if inc.value is not None:
                cap = min(cap, inc.value - 1 - ndel)
            if cap < 0:
                return None
            m, totals = kernels.min_free_deletions(contrib, order, state, cap)
            if int((m == 0).sum()) >= spec.k and canonical_pk(deleted) >= spec.k:
                # subtree minimum is ndel, realized by stopping here
                if inc.value is None or ndel < inc.value:
                    inc.set(deleted, ndel)
                return None
            probe(state, deleted, m, totals, cap)
            lb_extra = int(np.partition(m, spec.k - 1)[spec.k - 1])
            if lb_extra > cap:
                return None
            bound = ndel + lb_extra
            if inc.value is not None and bound >= inc.value:
                return None
            return (bound, -depth, next(next_id), depth, mask, ndel)

        r = spec.d - ndel
        m, totals = kernels.min_free_deletions(contrib, order, state, r)
        if int((m == 0).sum()) > inc.value:
            try_incumbent(deleted)
        probe(state, deleted, m, totals, r)
        ub = int((m <= r).sum())
        if ub <= inc.value:
            return None
        return (-ub, -depth, next(next_id), depth, mask, ndel)

    entry = evaluate(0, 0, 0)
    if entry is not None:
        heapq.heappush(heap, entry)

    capped = False
    while heap:
        if nodes >= limits.node_cap or time.perf_counter() - start > limits.time_cap:
            capped = True
            break
        key, _, node_id, depth, mask, ndel = heapq.heappop(heap)
        bound = key if topk else -key
        if inc.value is not None:
            if topk and bound >= inc.value:
                continue
            if not topk and bound <= inc.value:
                continue
        nodes += 1
        if trace is not None:
            trace.append((node_id, float(n - bound) if topk else float(bound)))
        if depth >= depth_total:
            continue
        if ndel + 1 <= max_del_total:
            child = evaluate(depth + 1, mask | (1 << depth), ndel + 1)
            if child is not None:
                heapq.heappush(heap, child)
        child = evaluate(depth + 1, mask, ndel)
        if child is not None:
            heapq.heappush(heap, child)

    wall = time.perf_counter() - start
    proved = not capped

    if topk:
        if inc.deleted is None:
            status = PlanStatus.INFEASIBLE if proved else PlanStatus.BUDGET_EXHAUSTED
            plan = make_plan(eff, (), status)
            return SolveReport(plan, proved, nodes, float("-inf"), wall, trace)
        if proved:
            best_bound = float(n - inc.value)
        else:
            open_lb = min((e[0] for e in heap), default=inc.value)
            best_bound = float(n - min(open_lb, inc.value))
        status = PlanStatus.OPTIMAL if proved else PlanStatus.BUDGET_EXHAUSTED
        return SolveReport(make_plan(eff, inc.deleted, status), proved, nodes,
                           best_bound, wall, trace)

    if proved:
        best_bound = float(inc.value)
    else:
        open_ub = max((-e[0] for e in heap), default=inc.value)
        best_bound = float(max(open_ub, inc.value))
    status = PlanStatus.OPTIMAL if proved else PlanStatus.BUDGET_EXHAUSTED
    return SolveReport(make_plan(eff, inc.deleted, status), proved, nodes,
                       best_bound, wall, trace)
