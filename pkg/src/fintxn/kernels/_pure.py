"""Pure-Python kernels: reference semantics for the compiled hot path.

Every function here must stay behaviourally identical to its twin in
``_hot.pyx``; the test suite runs both implementations against each other.
Inputs are the parallel adjacency columns (timestamp, amount, edge id) of one
vertex, sorted by (timestamp, edge id) ascending.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Sequence


def window_bounds(ts: Sequence[int], start: int, end: int) -> tuple[int, int]:
    """Index range [lo, hi) of timestamps strictly inside (start, end)."""
    lo = bisect_right(ts, start)
    hi = bisect_left(ts, end)
    return (lo, hi) if lo < hi else (lo, lo)


def truncate_topk(
    ts: Sequence[int],
    amount: Sequence[int],
    eid: Sequence[int],
    lo: int,
    hi: int,
    order: int,
    limit: int,
) -> list[int]:
    """Positions of the first ``limit`` edges of [lo, hi) under ``order``.

    Order codes follow TruncationOrder; ties break by edge id ascending.
    Returned positions are absolute indexes into the input columns, emitted
    in the sort order itself.
    """
    if order == 0:
        key = lambda i: (ts[i], eid[i])
    elif order == 1:
        key = lambda i: (-ts[i], eid[i])
    elif order == 2:
        key = lambda i: (amount[i], eid[i])
    elif order == 3:
        key = lambda i: (-amount[i], eid[i])
    else:
        raise ValueError(f"unknown truncation order code {order}")
    return sorted(range(lo, hi), key=key)[:limit]


def agg_amount_gt(
    amount: Sequence[int], lo: int, hi: int, threshold: int
) -> tuple[int, int, int]:
    """(count, sum, max) over amounts strictly greater than ``threshold``.

    ``max`` is 0 when nothing qualifies; callers decide sentinel handling.
    """
    count = 0
    total = 0
    best = 0
    for i in range(lo, hi):
        a = amount[i]
        if a > threshold:
            count += 1
            total += a
            if a > best:
                best = a
    return count, total, best


def select_amount_gt(
    amount: Sequence[int], lo: int, hi: int, threshold: int
) -> list[int]:
    """Positions in [lo, hi) whose amount strictly exceeds ``threshold``."""
    return [i for i in range(lo, hi) if amount[i] > threshold]
