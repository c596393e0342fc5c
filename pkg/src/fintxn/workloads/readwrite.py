"""Read-write operations trw1..trw3: guard read, candidate write, detection
read, then conditional abort plus a blocking side effect in a second
transaction.

Each operation returns True when the candidate write committed. When the
detection read fires, the first transaction aborts (the candidate edge is
gone) and a second transaction marks both endpoints blocked. A guard-stage
abort (an endpoint already blocked) has no side effects at all.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Optional

from ..core import TruncationSpec
from ..engine import Engine
from ..engine.schema import ACCOUNT, PERSON
from . import queries
from .writes import tw10, tw12, tw18, tw19


def _blocked(engine, txn, kind, vid) -> bool:
    return bool(engine.read_prop(txn, kind, vid, "isBlocked"))


def trw1(
    engine: Engine,
    src_id: int,
    dst_id: int,
    time: int,
    amount: int,
    start_time: int,
    end_time: int,
) -> bool:
    """Insert a transfer unless it closes a src->dst->other->src cycle."""
    txn = engine.begin()
    try:
        if _blocked(engine, txn, ACCOUNT, src_id) or _blocked(engine, txn, ACCOUNT, dst_id):
            engine.abort(txn)
            return False
        tw12(engine, txn, src_id, dst_id, time, amount)
        cycle = queries.tcr4(engine, txn, src_id, dst_id, start_time, end_time)
    except Exception:
        engine.abort(txn)
        raise
    if cycle:
        engine.abort(txn)
        _block_both(engine, ACCOUNT, src_id, dst_id)
        return False
    engine.commit(txn)
    return True


def trw2(
    engine: Engine,
    src_id: int,
    dst_id: int,
    time: int,
    amount: int,
    amount_threshold: int,
    start_time: int,
    end_time: int,
    ratio_threshold: float,
    trunc: Optional[TruncationSpec] = None,
) -> bool:
    """Insert a transfer unless either endpoint's in/out amount ratio then
    exceeds the threshold (a missing-out sentinel never exceeds)."""
    limit = Fraction(ratio_threshold)
    txn = engine.begin()
    try:
        if _blocked(engine, txn, ACCOUNT, src_id) or _blocked(engine, txn, ACCOUNT, dst_id):
            engine.abort(txn)
            return False
        tw12(engine, txn, src_id, dst_id, time, amount)
        exceeded = False
        for account in (src_id, dst_id):
            _, _, ratio = queries._in_out_ratio(
                engine, txn, account, amount_threshold, (start_time, end_time), trunc
            )
            if ratio is not None and Fraction(queries.round3(ratio)) > limit:
                exceeded = True
                break
    except Exception:
        engine.abort(txn)
        raise
    if exceeded:
        engine.abort(txn)
        _block_both(engine, ACCOUNT, src_id, dst_id)
        return False
    engine.commit(txn)
    return True


def trw3(
    engine: Engine,
    src_id: int,
    dst_id: int,
    time: int,
    threshold: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> bool:
    """Insert a guarantee unless the src person's chain then carries loans
    summing over the threshold."""
    txn = engine.begin()
    try:
        if _blocked(engine, txn, PERSON, src_id) or _blocked(engine, txn, PERSON, dst_id):
            engine.abort(txn)
            return False
        tw10(engine, txn, src_id, dst_id, time)
        sum_amount, _count = queries.tcr11(engine, txn, src_id, start_time, end_time, trunc)
    except Exception:
        engine.abort(txn)
        raise
    if sum_amount > Decimal(threshold).scaleb(-2):
        engine.abort(txn)
        _block_both(engine, PERSON, src_id, dst_id)
        return False
    engine.commit(txn)
    return True


def _block_both(engine: Engine, kind: str, id1: int, id2: int) -> None:
    txn = engine.begin()
    try:
        if kind == ACCOUNT:
            tw18(engine, txn, id1)
            tw18(engine, txn, id2)
        else:
            tw19(engine, txn, id1)
            tw19(engine, txn, id2)
    except Exception:
        engine.abort(txn)
        raise
    engine.commit(txn)
