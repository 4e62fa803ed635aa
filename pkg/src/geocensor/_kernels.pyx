# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the branch-and-bound search.

One min_free_deletions call per search node plus one probe_union call for
the incumbent heuristic; both run in O(L * N) with early exits. See
_kernels_py for the reference semantics.
"""

import numpy as np

DEF FREE = 0
DEF DELETED = 2


def min_free_deletions(const double[:, ::1] contrib, const int[:, ::1] order,
                       const unsigned char[::1] state, int cap):
    cdef Py_ssize_t L = contrib.shape[0]
    cdef Py_ssize_t N = contrib.shape[1]
    cdef int sentinel = cap + 1
    m_arr = np.empty(L, dtype=np.int32)
    totals_arr = np.zeros(L, dtype=np.float64)
    cdef int[::1] m = m_arr
    cdef double[::1] totals = totals_arr
    cdef Py_ssize_t l, pos, i
    cdef double total, v
    cdef int cnt

    with nogil:
        for l in range(L):
            total = 0.0
            for i in range(N):
                if state[i] != DELETED:
                    total = total + contrib[l, i]
            totals[l] = total
            if total >= 0.0:
                m[l] = 0
                continue
            m[l] = sentinel
            cnt = 0
            for pos in range(N):
                i = order[l, pos]
                v = contrib[l, i]
                if v >= 0.0:
                    break
                if state[i] != FREE:
                    continue
                total = total - v
                cnt = cnt + 1
                if total >= 0.0:
                    if cnt <= cap:
                        m[l] = cnt
                    break
                if cnt > cap:
                    break
    return m_arr, totals_arr


def probe_union(const double[:, ::1] contrib, const int[:, ::1] order,
                const unsigned char[::1] state, const double[::1] totals,
                const int[::1] ranked, int take, int budget_left,
                int[::1] out):
    cdef Py_ssize_t N = contrib.shape[1]
    cdef Py_ssize_t r, pos, p
    cdef Py_ssize_t l
    cdef double total, v
    cdef int count = 0
    cdef int plen, nnew, reached
    cdef int i
    seen_arr = np.zeros(N, dtype=np.uint8)
    prefix_arr = np.empty(N, dtype=np.int32)
    cdef unsigned char[::1] seen = seen_arr
    cdef int[::1] prefix = prefix_arr

    if take > ranked.shape[0]:
        take = ranked.shape[0]
    with nogil:
        for r in range(take):
            l = ranked[r]
            total = totals[l]
            if total >= 0.0:
                continue
            plen = 0
            reached = 0
            for pos in range(N):
                i = order[l, pos]
                v = contrib[l, i]
                if v >= 0.0:
                    break
                if state[i] != FREE:
                    continue
                total = total - v
                prefix[plen] = i
                plen = plen + 1
                if total >= 0.0:
                    reached = 1
                    break
            if reached == 0:
                continue
            nnew = 0
            for p in range(plen):
                if seen[prefix[p]] == 0:
                    nnew = nnew + 1
            if budget_left >= 0 and count + nnew > budget_left:
                continue
            for p in range(plen):
                i = prefix[p]
                if seen[i] == 0:
                    seen[i] = 1
                    out[count] = i
                    count = count + 1
    return count
