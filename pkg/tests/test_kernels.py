import itertools

import numpy as np
import pytest

from geocensor import _kernels_py
from geocensor._kernels_py import DELETED, FREE, KEPT

BACKENDS = [pytest.param(_kernels_py, id="python")]
try:
    from geocensor import _kernels

    BACKENDS.append(pytest.param(_kernels, id="cython"))
except ImportError:
    pass


def make_problem(rng, n, m, integer=False):
    if integer:
        contrib = rng.integers(-9, 9, size=(m, n)).astype(np.float64)
    else:
        contrib = rng.normal(size=(m, n))
    contrib = np.ascontiguousarray(contrib)
    order = np.ascontiguousarray(
        np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
    state = rng.choice([FREE, KEPT, DELETED], size=n,
                       p=[0.6, 0.2, 0.2]).astype(np.uint8)
    return contrib, order, state


def min_deletions_by_enumeration(contrib, state, cap):
    """Exact reference on integer contributions: smallest free subset whose
    removal makes the non-deleted sum non-negative."""
    L, N = contrib.shape
    free = [i for i in range(N) if state[i] == FREE]
    out = []
    for l in range(L):
        base = sum(int(contrib[l, i]) for i in range(N) if state[i] != DELETED)
        best = cap + 1
        for size in range(0, min(cap, len(free)) + 1):
            if size >= best:
                break
            for combo in itertools.combinations(free, size):
                if base - sum(int(contrib[l, i]) for i in combo) >= 0:
                    best = size
                    break
        out.append(best)
    return np.asarray(out, dtype=np.int32)


@pytest.mark.parametrize("impl", BACKENDS)
class TestMinFreeDeletions:
    def test_matches_enumeration_on_integer_instances(self, impl):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            m = int(rng.integers(1, 6))
            contrib, order, state = make_problem(rng, n, m, integer=True)
            cap = int(rng.integers(0, n + 1))
            got, totals = impl.min_free_deletions(contrib, order, state, cap)
            want = min_deletions_by_enumeration(contrib, state, cap)
            np.testing.assert_array_equal(got, want)
            base = contrib[:, state != DELETED].sum(axis=1)
            np.testing.assert_allclose(totals, base)

    def test_zero_when_already_nonnegative(self, impl):
        contrib = np.ascontiguousarray([[1.0, 2.0], [-1.0, 3.0]])
        order = np.ascontiguousarray(
            np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
        state = np.zeros(2, dtype=np.uint8)
        m, totals = impl.min_free_deletions(contrib, order, state, 2)
        assert m.tolist() == [0, 0]
        assert totals.tolist() == [3.0, 2.0]

    def test_sentinel_when_unreachable(self, impl):
        contrib = np.ascontiguousarray([[-5.0, 1.0]])
        order = np.ascontiguousarray(
            np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
        state = np.array([KEPT, FREE], dtype=np.uint8)
        m, _ = impl.min_free_deletions(contrib, order, state, 2)
        assert m.tolist() == [3]

    def test_cap_truncates(self, impl):
        contrib = np.ascontiguousarray([[-1.0, -1.0, -1.0, 0.5]])
        order = np.ascontiguousarray(
            np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
        state = np.zeros(4, dtype=np.uint8)
        full, _ = impl.min_free_deletions(contrib, order, state, 4)
        assert full.tolist() == [3]
        capped, _ = impl.min_free_deletions(contrib, order, state, 1)
        assert capped.tolist() == [2]  # sentinel = cap + 1


@pytest.mark.parametrize("impl", BACKENDS)
class TestProbeUnion:
    def test_collects_prefixes_without_duplicates(self, impl):
        contrib = np.ascontiguousarray([
            [-3.0, -1.0, 2.0, 0.0],
            [-3.0, 1.0, -2.0, 0.0],
        ])
        order = np.ascontiguousarray(
            np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
        state = np.zeros(4, dtype=np.uint8)
        m, totals = impl.min_free_deletions(contrib, order, state, 4)
        out = np.empty(4, dtype=np.int32)
        ranked = np.array([0, 1], dtype=np.int32)
        cnt = impl.probe_union(contrib, order, state, totals, ranked, 2, -1, out)
        union = sorted(out[:cnt].tolist())
        assert union == [0, 2]  # photo 0 shared by both prefixes, counted once

    def test_budget_mode_skips_oversized_prefixes(self, impl):
        contrib = np.ascontiguousarray([
            [-1.0, -1.0, -1.0, 0.5],
            [-0.5, 0.25, 0.0, 0.0],
        ])
        order = np.ascontiguousarray(
            np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
        state = np.zeros(4, dtype=np.uint8)
        m, totals = impl.min_free_deletions(contrib, order, state, 4)
        assert m.tolist() == [3, 1]
        out = np.empty(4, dtype=np.int32)
        ranked = np.array([1, 0], dtype=np.int32)  # cheap location first
        cnt = impl.probe_union(contrib, order, state, totals, ranked, 2, 1, out)
        assert sorted(out[:cnt].tolist()) == [0]  # location 0 needs 3, over budget


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend unavailable")
    rng = np.random.default_rng(9)
    for trial in range(40):
        n = int(rng.integers(2, 24))
        m = int(rng.integers(1, 12))
        integer = trial % 2 == 0
        contrib, order, state = make_problem(rng, n, m, integer=integer)
        cap = int(rng.integers(0, n + 1))
        m_py, tot_py = _kernels_py.min_free_deletions(contrib, order, state, cap)
        m_cy, tot_cy = _kernels.min_free_deletions(contrib, order, state, cap)
        np.testing.assert_array_equal(m_py, m_cy)
        np.testing.assert_array_equal(tot_py, tot_cy)
        usable = np.nonzero((m_py > 0) & (m_py <= cap))[0]
        if usable.size:
            ranked = usable[np.argsort(m_py[usable], kind="stable")].astype(np.int32)
            out_py = np.empty(n, dtype=np.int32)
            out_cy = np.empty(n, dtype=np.int32)
            budget = -1 if trial % 3 else cap
            c_py = _kernels_py.probe_union(contrib, order, state, tot_py,
                                           ranked, len(ranked), budget, out_py)
            c_cy = _kernels.probe_union(contrib, order, state, tot_cy,
                                        ranked, len(ranked), budget, out_cy)
            assert c_py == c_cy
            np.testing.assert_array_equal(out_py[:c_py], out_cy[:c_cy])
