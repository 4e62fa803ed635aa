"""Pure-numpy fallback for the search-node kernels.

Same contract as the compiled extension. The removal phase accumulates
gains with a cumulative sum, so last-ulp rounding may differ from the
compiled kernel's running subtraction; decisions that matter are always
re-checked against the core model by callers.
"""

from __future__ import annotations

import numpy as np

FREE = 0
KEPT = 1
DELETED = 2


def min_free_deletions(contrib: np.ndarray, order: np.ndarray,
                       state: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-location minimum number of free-photo removals to reach a non-negative sum.

    contrib: (L, N) float64, per-alternate-location per-photo contributions.
    order:   (L, N) int32, photo indices sorted by ascending contribution.
    state:   (N,) uint8 in {FREE, KEPT, DELETED}.
    cap:     removal counts above cap are reported as cap + 1.

    Returns (m, totals): (L,) int32 with cap + 1 marking locations
    unreachable within cap, and the (L,) non-deleted contribution sums.
    """
    L, N = contrib.shape
    sentinel = cap + 1
    not_deleted = state != DELETED

    totals = np.zeros(L, dtype=np.float64)
    for i in range(N):  # ascending index, matching the compiled kernel
        if not_deleted[i]:
            totals += contrib[:, i]

    m = np.full(L, sentinel, dtype=np.int32)
    done = totals >= 0.0
    m[done] = 0
    if done.all():
        return m, totals

    sc = np.take_along_axis(contrib, order, axis=1)
    removable = (state[order] == FREE) & (sc < 0.0)
    gains = np.where(removable, sc, 0.0)
    csum = np.cumsum(gains, axis=1)
    cnt = np.cumsum(removable, axis=1)

    ok = (totals[:, None] - csum) >= 0.0
    first = ok.argmax(axis=1)
    reachable = ok.any(axis=1) & ~done
    rows = np.nonzero(reachable)[0]
    counts = cnt[rows, first[rows]]
    counts = np.where(counts > cap, sentinel, counts)
    m[rows] = counts.astype(np.int32)
    return m, totals


def probe_union(contrib: np.ndarray, order: np.ndarray, state: np.ndarray,
                totals: np.ndarray, ranked: np.ndarray, take: int,
                budget_left: int, out: np.ndarray) -> int:
    """Union of per-location removal prefixes over the first `take` ranked
    locations; with budget_left >= 0 a prefix is merged only if the union
    still fits the budget. Fills `out` and returns the union size."""
    N = contrib.shape[1]
    seen = np.zeros(N, dtype=bool)
    count = 0
    for l in ranked[:take]:
        total = float(totals[l])
        if total >= 0.0:
            continue
        prefix: list[int] = []
        reached = False
        for i in order[l]:
            v = contrib[l, i]
            if v >= 0.0:
                break
            if state[i] != FREE:
                continue
            total -= v
            prefix.append(int(i))
            if total >= 0.0:
                reached = True
                break
        if not reached:
            continue
        new = [i for i in prefix if not seen[i]]
        if budget_left >= 0 and count + len(new) > budget_left:
            continue
        for i in new:
            seen[i] = True
            out[count] = i
            count += 1
    return count
