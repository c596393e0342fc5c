# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-hop adjacency scan.

Semantics mirror ``_pure`` exactly: same inputs, same outputs, same tie
breaks. The GIL is held for the whole call so adjacency arrays can never be
resized while a buffer over them is exported.
"""

from libc.stdlib cimport free, malloc


def window_bounds(long long[::1] ts, long long start, long long end):
    """Index range [lo, hi) of timestamps strictly inside (start, end)."""
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t a, b, mid
    # first index with ts[i] > start
    a = 0
    b = n
    while a < b:
        mid = (a + b) >> 1
        if ts[mid] <= start:
            a = mid + 1
        else:
            b = mid
    cdef Py_ssize_t lo = a
    # first index with ts[i] >= end
    a = lo
    b = n
    while a < b:
        mid = (a + b) >> 1
        if ts[mid] < end:
            a = mid + 1
        else:
            b = mid
    if lo < a:
        return lo, a
    return lo, lo


cdef inline bint _worse(long long k1, long long e1, long long k2, long long e2):
    # True when (k1, e1) ranks strictly after (k2, e2).
    if k1 != k2:
        return k1 > k2
    return e1 > e2


cdef void _sift_down(long long* hk, long long* he, long long* hp,
                     Py_ssize_t start, Py_ssize_t size) noexcept:
    cdef Py_ssize_t root = start, child
    cdef long long tk, te, tp
    while True:
        child = 2 * root + 1
        if child >= size:
            return
        if child + 1 < size and _worse(hk[child + 1], he[child + 1], hk[child], he[child]):
            child += 1
        if _worse(hk[child], he[child], hk[root], he[root]):
            tk = hk[root]; te = he[root]; tp = hp[root]
            hk[root] = hk[child]; he[root] = he[child]; hp[root] = hp[child]
            hk[child] = tk; he[child] = te; hp[child] = tp
            root = child
        else:
            return


cdef void _sift_up(long long* hk, long long* he, long long* hp,
                   Py_ssize_t pos) noexcept:
    cdef Py_ssize_t parent
    cdef long long tk, te, tp
    while pos > 0:
        parent = (pos - 1) >> 1
        if _worse(hk[pos], he[pos], hk[parent], he[parent]):
            tk = hk[parent]; te = he[parent]; tp = hp[parent]
            hk[parent] = hk[pos]; he[parent] = he[pos]; hp[parent] = hp[pos]
            hk[pos] = tk; he[pos] = te; hp[pos] = tp
            pos = parent
        else:
            return


def truncate_topk(long long[::1] ts, long long[::1] amount, long long[::1] eid,
                  Py_ssize_t lo, Py_ssize_t hi, int order, Py_ssize_t limit):
    """Positions of the first ``limit`` edges of [lo, hi) under ``order``."""
    if order < 0 or order > 3:
        raise ValueError(f"unknown truncation order code {order}")
    cdef Py_ssize_t n = hi - lo
    if n <= 0 or limit <= 0:
        return []
    cdef Py_ssize_t cap = limit if limit < n else n
    cdef long long* hk = <long long*> malloc(cap * sizeof(long long))
    cdef long long* he = <long long*> malloc(cap * sizeof(long long))
    cdef long long* hp = <long long*> malloc(cap * sizeof(long long))
    if hk == NULL or he == NULL or hp == NULL:
        free(hk); free(he); free(hp)
        raise MemoryError()
    cdef bint by_amount = order >= 2
    cdef bint descending = (order == 1) or (order == 3)
    cdef Py_ssize_t size = 0, i, m
    cdef long long k, e, tk, te, tp
    try:
        # Bounded max-heap keyed by "worse": the root is the worst kept edge.
        for i in range(lo, hi):
            k = amount[i] if by_amount else ts[i]
            if descending:
                k = -k
            e = eid[i]
            if size < cap:
                hk[size] = k; he[size] = e; hp[size] = i
                size += 1
                _sift_up(hk, he, hp, size - 1)
            elif _worse(hk[0], he[0], k, e):
                hk[0] = k; he[0] = e; hp[0] = i
                _sift_down(hk, he, hp, 0, size)
        # Heapsort: move the worst to the tail until sorted best-first.
        m = size
        while m > 1:
            m -= 1
            tk = hk[0]; te = he[0]; tp = hp[0]
            hk[0] = hk[m]; he[0] = he[m]; hp[0] = hp[m]
            hk[m] = tk; he[m] = te; hp[m] = tp
            _sift_down(hk, he, hp, 0, m)
        return [hp[i] for i in range(size)]
    finally:
        free(hk); free(he); free(hp)


def agg_amount_gt(long long[::1] amount, Py_ssize_t lo, Py_ssize_t hi,
                  long long threshold):
    """(count, sum, max) over amounts strictly greater than ``threshold``."""
    cdef Py_ssize_t count = 0, i
    cdef long long total = 0, best = 0, a
    for i in range(lo, hi):
        a = amount[i]
        if a > threshold:
            count += 1
            total += a
            if a > best:
                best = a
    return count, total, best


def select_amount_gt(long long[::1] amount, Py_ssize_t lo, Py_ssize_t hi,
                     long long threshold):
    """Positions in [lo, hi) whose amount strictly exceeds ``threshold``."""
    cdef list out = []
    cdef Py_ssize_t i
    for i in range(lo, hi):
        if amount[i] > threshold:
            out.append(i)
    return out
