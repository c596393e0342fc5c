"""Read operations: twelve multi-hop reads (tcr1..tcr12) and six point reads
(tsr1..tsr6) against the engine.

Conventions shared by every operation here:

* time windows are strict on both ends (start < t < end);
* "exceeds" is a strict comparison;
* truncation applies to each hop's expansion after window filtering, per
  expanded vertex, ties broken by edge id ascending;
* money aggregates are exact integer cents, divided as exact fractions and
  rounded to three decimals only in the returned row;
* a ratio whose denominator has no edges is the sentinel -1.000.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Optional

from ..core import TruncationSpec, canonicalize_paths, round3
from ..engine import Engine, Transaction
from ..engine.graph import IN, OUT
from ..engine.schema import (
    ACCOUNT,
    APPLY,
    COMPANY,
    DEPOSIT,
    GUARANTEE,
    INVEST,
    LOAN,
    MEDIUM,
    OWN,
    PERSON,
    REPAY,
    SIGN_IN,
    TRANSFER,
    WITHDRAW,
)
from ..errors import MissingEntityError

NO_RATIO = Decimal("-1.000")


def _money(cents: int) -> Decimal:
    return round3(Fraction(cents, 100))


def _ratio(num: int, den: int) -> Decimal:
    return round3(Fraction(num, den))


def _require(engine: Engine, txn: Transaction, kind: str, vid: int) -> None:
    if not engine.vertex_exists(txn, kind, vid):
        raise MissingEntityError(f"{kind} {vid} does not exist")


def _owned_accounts(engine: Engine, txn: Transaction, kind: str, owner: int) -> list[int]:
    return list(engine.edges(txn, kind, owner, OWN, OUT).other)


def _owner_of(engine: Engine, txn: Transaction, account: int) -> Optional[tuple[str, int]]:
    batch = engine.edges(txn, ACCOUNT, account, OWN, IN)
    if not len(batch):
        return None
    kind, _ = engine.edge_endpoint_kinds(txn, OWN, batch.eid[0])
    return kind, batch.other[0]


def tcr1(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, int, int, str]]:
    """Accounts fund-reachable in 1..3 strictly-ascending transfer steps that
    were signed in by a blocked medium; rows (otherId, distance, mediumId,
    mediumType) sorted by distance, otherId, mediumId."""
    _require(engine, txn, ACCOUNT, account_id)
    reached: set[tuple[int, int]] = set()
    states = {(account_id, start_time)}
    for distance in (1, 2, 3):
        nxt: set[tuple[int, int]] = set()
        for vid, floor_ts in states:
            batch = engine.edges(
                txn, ACCOUNT, vid, TRANSFER, OUT,
                window=(floor_ts, end_time), trunc=trunc,
            )
            for other, ts in zip(batch.other, batch.ts):
                if other != account_id:
                    reached.add((other, distance))
                nxt.add((other, ts))
        states = nxt
        if not states:
            break
    rows = []
    medium_cache: dict[int, Optional[str]] = {}
    for acct, distance in reached:
        sign_ins = engine.edges(
            txn, ACCOUNT, acct, SIGN_IN, IN, window=(start_time, end_time)
        )
        for medium_id in set(sign_ins.other):
            if medium_id not in medium_cache:
                props = engine.read_props(txn, MEDIUM, medium_id)
                medium_cache[medium_id] = props["type"] if props["isBlocked"] else None
            mtype = medium_cache[medium_id]
            if mtype is not None:
                rows.append((acct, distance, medium_id, mtype))
    rows.sort(key=lambda r: (r[1], r[0], r[2]))
    return rows


def tcr2(
    engine: Engine,
    txn: Transaction,
    person_id: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, Decimal, Decimal]]:
    """Upstream accounts within 3 reversed transfer steps of the person's
    accounts that received loan deposits in the window; each backward step's
    timestamp strictly exceeds the step nearer the owned account. Rows
    (otherId, sumLoanAmount, sumLoanBalance) sorted by sum desc, id asc."""
    _require(engine, txn, PERSON, person_id)
    owned = set(_owned_accounts(engine, txn, PERSON, person_id))
    upstream: set[int] = set()
    for seed in owned:
        states = {(seed, start_time)}
        for _depth in range(3):
            nxt: set[tuple[int, int]] = set()
            for vid, floor_ts in states:
                batch = engine.edges(
                    txn, ACCOUNT, vid, TRANSFER, IN,
                    window=(floor_ts, end_time), trunc=trunc,
                )
                for other, ts in zip(batch.other, batch.ts):
                    if other not in owned:
                        upstream.add(other)
                    nxt.add((other, ts))
            states = nxt
            if not states:
                break
    rows = []
    for acct in upstream:
        deposits = engine.edges(
            txn, ACCOUNT, acct, DEPOSIT, IN, window=(start_time, end_time)
        )
        loans = set(deposits.other)
        if not loans:
            continue
        amount = balance = 0
        for loan in loans:
            props = engine.read_props(txn, LOAN, loan)
            amount += props["loanAmount"]
            balance += props["balance"]
        rows.append((acct, amount, balance))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return [(acct, _money(a), _money(b)) for acct, a, b in rows]


def tcr3(
    engine: Engine,
    txn: Transaction,
    id1: int,
    id2: int,
    start_time: int,
    end_time: int,
) -> int:
    """Length of the shortest directed transfer path inside the window; -1
    when unreachable."""
    _require(engine, txn, ACCOUNT, id1)
    _require(engine, txn, ACCOUNT, id2)
    if id1 == id2:
        return 0
    window = (start_time, end_time)
    visited = {id1}
    frontier = [id1]
    distance = 0
    while frontier:
        distance += 1
        nxt = []
        for vid in frontier:
            for other in set(engine.edges(txn, ACCOUNT, vid, TRANSFER, OUT, window=window).other):
                if other == id2:
                    return distance
                if other not in visited:
                    visited.add(other)
                    nxt.append(other)
        frontier = nxt
    return -1


def tcr4(
    engine: Engine,
    txn: Transaction,
    id1: int,
    id2: int,
    start_time: int,
    end_time: int,
) -> list[tuple[int, int, Decimal, Decimal, int, Decimal, Decimal]]:
    """Three-account transfer cycles src->dst->other->src; aggregates per
    other account, empty when no src->dst transfer exists in the window."""
    _require(engine, txn, ACCOUNT, id1)
    _require(engine, txn, ACCOUNT, id2)
    window = (start_time, end_time)
    direct = engine.edges(txn, ACCOUNT, id1, TRANSFER, OUT, window=window)
    if id2 not in direct.other:
        return []
    edge2: dict[int, list[int]] = {}
    out_of_dst = engine.edges(txn, ACCOUNT, id2, TRANSFER, OUT, window=window)
    for other, amt in zip(out_of_dst.other, out_of_dst.amt):
        if other not in (id1, id2):
            edge2.setdefault(other, []).append(amt)
    edge3: dict[int, list[int]] = {}
    into_src = engine.edges(txn, ACCOUNT, id1, TRANSFER, IN, window=window)
    for other, amt in zip(into_src.other, into_src.amt):
        if other not in (id1, id2):
            edge3.setdefault(other, []).append(amt)
    rows = []
    for other in edge2.keys() & edge3.keys():
        a2, a3 = edge2[other], edge3[other]
        rows.append((other, len(a2), sum(a2), max(a2), len(a3), sum(a3), max(a3)))
    rows.sort(key=lambda r: (-r[2], -r[5], r[0]))
    return [
        (o, n2, _money(s2), _money(m2), n3, _money(s3), _money(m3))
        for o, n2, s2, m2, n3, s3, m3 in rows
    ]


def tcr5(
    engine: Engine,
    txn: Transaction,
    person_id: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, ...]]:
    """All simple transfer traces of 1..3 strictly-ascending steps from the
    person's accounts, canonicalized (longest first, then lexicographic)."""
    _require(engine, txn, PERSON, person_id)
    paths: set[tuple[int, ...]] = set()

    def extend(path: tuple[int, ...], floor_ts: int) -> None:
        if len(path) > 3:
            return
        batch = engine.edges(
            txn, ACCOUNT, path[-1], TRANSFER, OUT,
            window=(floor_ts, end_time), trunc=trunc,
        )
        for other, ts in zip(batch.other, batch.ts):
            if other in path:
                continue
            new_path = path + (other,)
            paths.add(new_path)
            extend(new_path, ts)

    for seed in _owned_accounts(engine, txn, PERSON, person_id):
        extend((seed,), start_time)
    return canonicalize_paths(paths)


def tcr6(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold1: int,
    threshold2: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, Decimal, Decimal]]:
    """Middle accounts withdrawing over threshold2 into this card account
    after gathering more than 3 transfer-ins over threshold1; rows
    (midId, sumEdge1Amount, sumEdge2Amount) sorted by sum2 desc, id asc."""
    _require(engine, txn, ACCOUNT, account_id)
    window = (start_time, end_time)
    withdraws = engine.edges(
        txn, ACCOUNT, account_id, WITHDRAW, IN,
        window=window, trunc=trunc, min_amount_exclusive=threshold2,
    )
    sum2: dict[int, int] = {}
    for mid, amt in zip(withdraws.other, withdraws.amt):
        sum2[mid] = sum2.get(mid, 0) + amt
    rows = []
    for mid, s2 in sum2.items():
        ins = engine.edges(
            txn, ACCOUNT, mid, TRANSFER, IN,
            window=window, trunc=trunc, min_amount_exclusive=threshold1,
        )
        if len(ins) > 3:
            rows.append((mid, sum(ins.amt), s2))
    rows.sort(key=lambda r: (-r[2], r[0]))
    return [(mid, _money(s1), _money(s2)) for mid, s1, s2 in rows]


def _in_out_ratio(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    window: tuple[int, int],
    trunc: Optional[TruncationSpec],
) -> tuple[int, int, Optional[Fraction]]:
    """(distinct srcs, distinct dsts, in/out amount ratio or None when no
    qualifying transfer-out exists)."""
    ins = engine.edges(
        txn, ACCOUNT, account_id, TRANSFER, IN,
        window=window, trunc=trunc, min_amount_exclusive=threshold,
    )
    outs = engine.edges(
        txn, ACCOUNT, account_id, TRANSFER, OUT,
        window=window, trunc=trunc, min_amount_exclusive=threshold,
    )
    num_src = len(set(ins.other))
    num_dst = len(set(outs.other))
    if not len(outs):
        return num_src, num_dst, None
    return num_src, num_dst, Fraction(sum(ins.amt), sum(outs.amt))


def tcr7(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> tuple[int, int, Decimal]:
    """Distinct counterparty counts and the transfer in/out amount ratio over
    edges whose amount exceeds the threshold; ratio -1 without outgoing."""
    _require(engine, txn, ACCOUNT, account_id)
    num_src, num_dst, ratio = _in_out_ratio(
        engine, txn, account_id, threshold, (start_time, end_time), trunc
    )
    return num_src, num_dst, NO_RATIO if ratio is None else round3(ratio)


def tcr8(
    engine: Engine,
    txn: Transaction,
    loan_id: int,
    threshold: float,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, Decimal, int]]:
    """Downstream accounts within 3 transfer/withdraw steps of the loan's
    deposit accounts, tracing only edges whose amount exceeds ``threshold``
    times the source's total in-window transfer-in amount. Rows
    (dstId, inflow/loanAmount, minDistance) sorted by distance desc,
    ratio desc, id asc; the deposit accounts themselves are excluded."""
    _require(engine, txn, LOAN, loan_id)
    window = (start_time, end_time)
    factor = Fraction(threshold)
    loan_amount = engine.read_props(txn, LOAN, loan_id)["loanAmount"]
    seeds = set(engine.edges(txn, LOAN, loan_id, DEPOSIT, OUT).other)
    if not seeds or loan_amount <= 0:
        return []
    dist: dict[int, int] = {seed: 0 for seed in seeds}
    inflow: dict[int, int] = {}
    frontier = sorted(seeds)
    for depth in (1, 2, 3):
        nxt: list[int] = []
        for vid in frontier:
            _, upstream_total, _ = engine.agg_edges(txn, ACCOUNT, vid, TRANSFER, IN, window=window)
            cut = factor * upstream_total
            merged: list[tuple[tuple, int, int]] = []
            for ekind in (TRANSFER, WITHDRAW):
                batch = engine.edges(txn, ACCOUNT, vid, ekind, OUT, window=window, trunc=trunc)
                for ts, eid, other, amt in zip(batch.ts, batch.eid, batch.other, batch.amt):
                    merged.append(((_trunc_key(trunc, ts, amt), eid, ekind), other, amt))
            if trunc is not None:
                # The two per-kind lists are already truncated; re-truncating the
                # merged list keeps "at most limit edges traversed per step".
                merged.sort(key=lambda m: m[0])
                merged = merged[: trunc.limit]
            for _key, other, amt in merged:
                if amt <= cut or other in seeds:
                    continue
                inflow[other] = inflow.get(other, 0) + amt
                if other not in dist:
                    dist[other] = depth
                    nxt.append(other)
        frontier = sorted(set(nxt))
        if not frontier:
            break
    rows = [
        (vid, round3(Fraction(inflow[vid], loan_amount)), d)
        for vid, d in dist.items()
        if d > 0
    ]
    rows.sort(key=lambda r: (-r[2], -r[1], r[0]))
    return rows


def _trunc_key(trunc: Optional[TruncationSpec], ts: int, amt: int) -> tuple:
    if trunc is None:
        return (0,)
    order = int(trunc.order)
    if order == 0:
        return (ts,)
    if order == 1:
        return (-ts,)
    if order == 2:
        return (amt,)
    return (-amt,)


def tcr9(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> tuple[Decimal, Decimal, Decimal]:
    """Loan-laundering ratios around one account: deposits-in over repays-out,
    deposits-in over transfers-out, transfers-in over transfers-out."""
    _require(engine, txn, ACCOUNT, account_id)
    window = (start_time, end_time)

    def qualifying(ekind: str, direction: str) -> tuple[int, int]:
        batch = engine.edges(
            txn, ACCOUNT, account_id, ekind, direction,
            window=window, trunc=trunc, min_amount_exclusive=threshold,
        )
        return len(batch), sum(batch.amt)

    n1, s1 = qualifying(DEPOSIT, IN)
    n2, s2 = qualifying(REPAY, OUT)
    n3, s3 = qualifying(TRANSFER, IN)
    n4, s4 = qualifying(TRANSFER, OUT)
    ratio_repay = _ratio(s1, s2) if n2 else NO_RATIO
    ratio_deposit = _ratio(s1, s4) if n4 else NO_RATIO
    ratio_transfer = _ratio(s3, s4) if n4 else NO_RATIO
    return ratio_repay, ratio_deposit, ratio_transfer


def tcr10(
    engine: Engine,
    txn: Transaction,
    pid1: int,
    pid2: int,
    start_time: int,
    end_time: int,
) -> Decimal:
    """Jaccard similarity of the two persons' in-window investment targets."""
    _require(engine, txn, PERSON, pid1)
    _require(engine, txn, PERSON, pid2)
    window = (start_time, end_time)
    s1 = set(engine.edges(txn, PERSON, pid1, INVEST, OUT, window=window).other)
    s2 = set(engine.edges(txn, PERSON, pid2, INVEST, OUT, window=window).other)
    union = s1 | s2
    if not union:
        return round3(0)
    return round3(Fraction(len(s1 & s2), len(union)))


def tcr11(
    engine: Engine,
    txn: Transaction,
    person_id: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> tuple[Decimal, int]:
    """Total amount and count of distinct loans applied by everyone in the
    person's transitive in-window guarantee chain (start person excluded)."""
    _require(engine, txn, PERSON, person_id)
    window = (start_time, end_time)
    start = (PERSON, person_id)
    visited = {start}
    frontier = [start]
    loans: set[int] = set()
    while frontier:
        nxt = []
        for kind, vid in frontier:
            batch = engine.edges(txn, kind, vid, GUARANTEE, OUT, window=window, trunc=trunc)
            for eid, other in zip(batch.eid, batch.other):
                _, dst_kind = engine.edge_endpoint_kinds(txn, GUARANTEE, eid)
                node = (dst_kind, other)
                if node not in visited:
                    visited.add(node)
                    nxt.append(node)
        frontier = nxt
    for kind, vid in visited - {start}:
        applied = engine.edges(txn, kind, vid, APPLY, OUT, window=window, trunc=trunc)
        loans.update(applied.other)
    total = sum(engine.read_props(txn, LOAN, loan)["loanAmount"] for loan in loans)
    return _money(total), len(loans)


def tcr12(
    engine: Engine,
    txn: Transaction,
    person_id: int,
    start_time: int,
    end_time: int,
    trunc: Optional[TruncationSpec] = None,
) -> list[tuple[int, Decimal]]:
    """Company-owned accounts the person's accounts transferred to, with
    amount sums; sorted by sum desc, account id asc."""
    _require(engine, txn, PERSON, person_id)
    window = (start_time, end_time)
    sums: dict[int, int] = {}
    company_owned: dict[int, bool] = {}
    for acct in _owned_accounts(engine, txn, PERSON, person_id):
        batch = engine.edges(txn, ACCOUNT, acct, TRANSFER, OUT, window=window, trunc=trunc)
        for other, amt in zip(batch.other, batch.amt):
            if other not in company_owned:
                owner = _owner_of(engine, txn, other)
                company_owned[other] = owner is not None and owner[0] == COMPANY
            if company_owned[other]:
                sums[other] = sums.get(other, 0) + amt
    rows = sorted(sums.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(acct, _money(total)) for acct, total in rows]


def tsr1(engine: Engine, txn: Transaction, account_id: int) -> tuple[int, bool, str]:
    props = engine.read_props(txn, ACCOUNT, account_id)
    return props["createTime"], props["isBlocked"], props["type"]


def tsr2(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    start_time: int,
    end_time: int,
) -> tuple[Decimal, Decimal, int, Decimal, Decimal, int]:
    """Sum/max/count of transfer-outs then transfer-ins; max is -1 when the
    side has no edges."""
    _require(engine, txn, ACCOUNT, account_id)
    window = (start_time, end_time)
    out_n, out_sum, out_max = engine.agg_edges(txn, ACCOUNT, account_id, TRANSFER, OUT, window=window)
    in_n, in_sum, in_max = engine.agg_edges(txn, ACCOUNT, account_id, TRANSFER, IN, window=window)
    return (
        _money(out_sum),
        _money(out_max) if out_n else NO_RATIO,
        out_n,
        _money(in_sum),
        _money(in_max) if in_n else NO_RATIO,
        in_n,
    )


def tsr3(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    start_time: int,
    end_time: int,
) -> Decimal:
    """Share of qualifying transfer-ins coming from blocked accounts; -1
    when nothing qualifies."""
    _require(engine, txn, ACCOUNT, account_id)
    ins = engine.edges(
        txn, ACCOUNT, account_id, TRANSFER, IN,
        window=(start_time, end_time), min_amount_exclusive=threshold,
    )
    if not len(ins):
        return NO_RATIO
    blocked_cache: dict[int, bool] = {}
    blocked = 0
    for src in ins.other:
        if src not in blocked_cache:
            blocked_cache[src] = engine.read_prop(txn, ACCOUNT, src, "isBlocked")
        if blocked_cache[src]:
            blocked += 1
    return _ratio(blocked, len(ins))


def _grouped_over_threshold(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    direction: str,
    threshold: int,
    window: tuple[int, int],
) -> list[tuple[int, int, Decimal]]:
    batch = engine.edges(
        txn, ACCOUNT, account_id, TRANSFER, direction,
        window=window, min_amount_exclusive=threshold,
    )
    grouped: dict[int, list[int]] = {}
    for other, amt in zip(batch.other, batch.amt):
        grouped.setdefault(other, []).append(amt)
    rows = sorted(
        ((other, len(amts), sum(amts)) for other, amts in grouped.items()),
        key=lambda r: (-r[2], r[0]),
    )
    return [(other, n, _money(s)) for other, n, s in rows]


def tsr4(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    start_time: int,
    end_time: int,
) -> list[tuple[int, int, Decimal]]:
    _require(engine, txn, ACCOUNT, account_id)
    return _grouped_over_threshold(engine, txn, account_id, OUT, threshold, (start_time, end_time))


def tsr5(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    threshold: int,
    start_time: int,
    end_time: int,
) -> list[tuple[int, int, Decimal]]:
    _require(engine, txn, ACCOUNT, account_id)
    return _grouped_over_threshold(engine, txn, account_id, IN, threshold, (start_time, end_time))


def tsr6(
    engine: Engine,
    txn: Transaction,
    account_id: int,
    start_time: int,
    end_time: int,
) -> list[int]:
    """Blocked accounts sharing an in-window transfer source with this one."""
    _require(engine, txn, ACCOUNT, account_id)
    window = (start_time, end_time)
    mids = set(engine.edges(txn, ACCOUNT, account_id, TRANSFER, IN, window=window).other)
    blocked: set[int] = set()
    for mid in mids:
        for dst in set(engine.edges(txn, ACCOUNT, mid, TRANSFER, OUT, window=window).other):
            if dst != account_id and dst not in blocked:
                if engine.read_prop(txn, ACCOUNT, dst, "isBlocked"):
                    blocked.add(dst)
    return sorted(blocked)
