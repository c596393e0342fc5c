"""Transactional reference engine: 2PL isolation, WAL durability, recovery.

Writes go to the shared graph in place, guarded by exclusive locks held to
commit, with an undo log for aborts. Visibility is therefore purely a lock
discipline:

* SERIALIZABLE — shared read locks held to commit (strict 2PL);
* READ_COMMITTED — shared read locks released right after each read;
* READ_UNCOMMITTED — reads take no locks and see in-flight versions.

Deadlocks abort the youngest transaction in the cycle, surfacing as
`SerializationConflict`; the engine has already rolled the victim back when
the caller sees it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional

from ..core import TruncationSpec
from ..errors import (
    EngineClosedError,
    MissingEntityError,
    SchemaError,
    SerializationConflict,
    TransactionError,
)
from . import schema, wal as walmod
from .graph import IN, OUT, EdgeColumns, GraphStore
from .locks import LockManager, LockMode
from .. import kernels


class IsolationLevel(Enum):
    READ_UNCOMMITTED = "read_uncommitted"
    READ_COMMITTED = "read_committed"
    SERIALIZABLE = "serializable"

    @classmethod
    def parse(cls, name: str) -> "IsolationLevel":
        return cls(name.strip().lower())


class TxnState(Enum):
    ACTIVE = "active"
    COMMITTED = "committed"
    ABORTED = "aborted"


class Transaction:
    __slots__ = ("txn_id", "state", "doomed", "undo", "redo", "read_set", "write_set")

    def __init__(self, txn_id: int):
        self.txn_id = txn_id
        self.state = TxnState.ACTIVE
        self.doomed = False
        self.undo: list[tuple] = []
        self.redo: list[list] = []
        self.read_set: set = set()
        self.write_set: set = set()


@dataclass
class EdgeBatch:
    """Materialized selection of one vertex's edges, parallel columns."""

    ts: list[int] = field(default_factory=list)
    eid: list[int] = field(default_factory=list)
    other: list[int] = field(default_factory=list)
    amt: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.ts)

    def rows(self):
        return zip(self.eid, self.other, self.ts, self.amt)


@dataclass(frozen=True)
class EdgeView:
    """Full edge record as returned by `Engine.neighbors`."""

    kind: str
    eid: int
    src: int
    dst: int
    ts: int
    amount: int
    attrs: Optional[dict]


_S = LockMode.SHARED
_X = LockMode.EXCLUSIVE
_IX = LockMode.INTENT_EXCLUSIVE


class Engine:
    """Reference system under test; safe for concurrent use."""

    def __init__(
        self,
        isolation: IsolationLevel = IsolationLevel.SERIALIZABLE,
        wal_path: Optional[Path] = None,
        *,
        fsync: bool = False,
        strict_schema: bool = True,
        lock_timeout: float = 30.0,
    ):
        if isinstance(isolation, str):
            isolation = IsolationLevel.parse(isolation)
        self.isolation = isolation
        self.strict_schema = strict_schema
        self._store = GraphStore()
        self._lm = LockManager(wait_timeout=lock_timeout)
        self._mu = threading.RLock()
        self._txn_counter = 0
        self._active: dict[int, Transaction] = {}
        self._closed = False
        self._wal: Optional[walmod.WalWriter] = None
        self._wal_path = Path(wal_path) if wal_path else None
        self.trace_hook: Optional[Callable[[str, int], None]] = None
        self.recovered_commits = 0
        if self._wal_path is not None:
            self._recover_and_open()

    # -- lifecycle ----------------------------------------------------------

    def _recover_and_open(self) -> None:
        snap_seq = 0
        snap = walmod.read_snapshot(self._wal_path)
        if snap is not None:
            snap_seq, counters, records = snap
            for record in records:
                self._apply_record(record)
            self._store.counters.update(counters)
        groups, last_seq = walmod.scan_wal(self._wal_path)
        for _txn_id, records in groups:
            applied = False
            for record in records:
                if record[0] > snap_seq:
                    self._apply_record(record[2:])
                    applied = True
            if applied:
                self.recovered_commits += 1
        next_seq = max(snap_seq, last_seq) + 1
        self._wal = walmod.WalWriter(self._wal_path, next_seq=next_seq)

    def close(self) -> None:
        with self._mu:
            self._closed = True
            if self._wal:
                self._wal.close()
                self._wal = None

    def crash(self) -> None:
        """Simulate instantaneous failure: drop everything volatile, no flushing."""
        self._closed = True
        if self._wal:
            self._wal.abandon()
            self._wal = None
        self._active.clear()
        self._store = GraphStore()

    def checkpoint(self) -> None:
        """Persist a snapshot and drop the WAL prefix it covers."""
        with self._mu:
            self._ensure_open()
            if self._wal is None:
                raise EngineClosedError("checkpoint requires a write-ahead log")
            if self._active:
                raise TransactionError("checkpoint requires no active transactions")
            covered = self._wal.next_seq - 1
            walmod.write_snapshot(
                self._wal_path, covered, dict(self._store.counters), self._store.iter_records()
            )
            self._wal.close()
            walmod.rewrite_wal(self._wal_path, covered)
            self._wal = walmod.WalWriter(self._wal_path, next_seq=covered + 1)

    def bulk_load(self, records: Iterable[list]) -> None:
        """Apply initial-load records outside transaction control.

        Callers must be single-threaded here; follow with `checkpoint` to
        make the load durable when running with a WAL.
        """
        with self._mu:
            self._ensure_open()
            if self._active:
                raise TransactionError("bulk load requires no active transactions")
            for record in records:
                self._apply_record(record)

    def _ensure_open(self) -> None:
        if self._closed:
            raise EngineClosedError("engine is closed")

    def _apply_record(self, rec: list) -> None:
        store = self._store
        tag = rec[0]
        if tag == "V+":
            store.add_vertex(rec[1], rec[2], rec[3])
        elif tag == "E+":
            store.add_edge(*rec[1:])
        elif tag == "VP":
            store.set_vertex_prop(rec[1], rec[2], rec[3], rec[4])
        elif tag == "EP":
            store.set_edge_prop(rec[1], rec[2], rec[3], rec[4])
        elif tag == "E-":
            store.remove_edge(rec[1], rec[2])
        elif tag == "V-":
            store.remove_vertex(rec[1], rec[2])
        else:
            raise SchemaError(f"unknown record tag {tag!r}")

    # -- transactions --------------------------------------------------------

    def begin(self) -> Transaction:
        with self._mu:
            self._ensure_open()
            self._txn_counter += 1
            txn = Transaction(self._txn_counter)
            self._active[txn.txn_id] = txn
        if self.trace_hook:
            self.trace_hook("begin", txn.txn_id)
        return txn

    def commit(self, txn: Transaction) -> None:
        self._check_active(txn)
        if self.trace_hook:
            self.trace_hook("pre_commit", txn.txn_id)
        if self._wal is not None and txn.redo:
            self._wal.append_commit(txn.txn_id, txn.redo)
        with self._mu:
            txn.state = TxnState.COMMITTED
            self._active.pop(txn.txn_id, None)
        self._lm.release_all(txn)
        if self.trace_hook:
            self.trace_hook("commit", txn.txn_id)

    def abort(self, txn: Transaction) -> None:
        if txn.state is TxnState.ABORTED:
            return
        if txn.state is TxnState.COMMITTED:
            raise TransactionError(f"transaction {txn.txn_id} already committed")
        with self._mu:
            for entry in reversed(txn.undo):
                self._undo_entry(entry)
            txn.undo.clear()
            txn.redo.clear()
            txn.state = TxnState.ABORTED
            self._active.pop(txn.txn_id, None)
        self._lm.release_all(txn)
        if self.trace_hook:
            self.trace_hook("abort", txn.txn_id)

    def _undo_entry(self, entry: tuple) -> None:
        store = self._store
        tag = entry[0]
        if tag == "V+":
            store.remove_vertex(entry[1], entry[2])
        elif tag == "E+":
            store.remove_edge(entry[1], entry[2])
        elif tag == "VP":
            _, kind, vid, name, old, had = entry
            props = store.vertex(kind, vid).props
            if had:
                props[name] = old
            else:
                props.pop(name, None)
        elif tag == "EP":
            _, ekind, eid, name, old, had = entry
            attrs = store.edge(ekind, eid).attrs
            if had:
                attrs[name] = old
            else:
                attrs.pop(name, None)
        elif tag == "E-":
            store.add_edge(*entry[1:])
        elif tag == "V-":
            store.add_vertex(entry[1], entry[2], entry[3])

    def _check_active(self, txn: Transaction) -> None:
        self._ensure_open()
        if txn.doomed and txn.state is TxnState.ACTIVE:
            self.abort(txn)
            raise SerializationConflict(
                f"transaction {txn.txn_id} aborted as deadlock victim"
            )
        if txn.state is not TxnState.ACTIVE:
            raise TransactionError(f"transaction {txn.txn_id} is {txn.state.value}")

    # -- locking helpers ------------------------------------------------------

    def _lock(self, txn: Transaction, resource: tuple, mode: LockMode):
        try:
            return self._lm.acquire(txn, resource, mode)
        except SerializationConflict:
            self.abort(txn)
            raise

    def _read_acquire(self, txn: Transaction, resource: tuple):
        if self.isolation is IsolationLevel.READ_UNCOMMITTED:
            return None
        txn.read_set.add(resource)
        return self._lock(txn, resource, _S)

    def _read_release(self, txn: Transaction, resource: tuple, token) -> None:
        if token is not None and self.isolation is IsolationLevel.READ_COMMITTED:
            self._lm.release_mode(txn, resource, token)

    def _write_lock(self, txn: Transaction, resource: tuple) -> None:
        txn.write_set.add(resource)
        self._lock(txn, resource, _X)

    # -- writes ---------------------------------------------------------------

    def insert_vertex(self, txn: Transaction, kind: str, vid: int, props: dict) -> int:
        self._check_active(txn)
        schema.check_vertex_kind(kind)
        props = dict(props)
        if self.strict_schema:
            schema.check_vertex_properties(kind, props)
        self._write_lock(txn, ("V", kind, vid))
        self._lock(txn, ("K", kind), _IX)
        with self._mu:
            self._store.add_vertex(kind, vid, props)
            txn.undo.append(("V+", kind, vid))
            txn.redo.append(["V+", kind, vid, props])
        return vid

    def insert_edge(
        self,
        txn: Transaction,
        ekind: str,
        src_kind: str,
        src: int,
        dst_kind: str,
        dst: int,
        ts: int,
        amount: int = 0,
        attrs: Optional[dict] = None,
    ) -> int:
        self._check_active(txn)
        schema.check_endpoints(ekind, src_kind, dst_kind)
        if not isinstance(amount, int):
            raise SchemaError(f"{ekind} amount must be integer cents, got {type(amount).__name__}")
        for resource in sorted({("V", src_kind, src), ("V", dst_kind, dst)}):
            self._write_lock(txn, resource)
        with self._mu:
            store = self._store
            # Existence checks before mutation so failures leave no trace.
            store.vertex(src_kind, src)
            store.vertex(dst_kind, dst)
            store.check_multiplicity(ekind, src_kind, src, dst_kind, dst)
            eid = store.counters[ekind]
            attrs = dict(attrs) if attrs else None
            store.add_edge(ekind, eid, src_kind, src, dst_kind, dst, ts, amount, attrs)
            txn.undo.append(("E+", ekind, eid))
            txn.redo.append(["E+", ekind, eid, src_kind, src, dst_kind, dst, ts, amount, attrs])
        return eid

    def update_property(self, txn: Transaction, kind: str, vid: int, name: str, value) -> None:
        self._check_active(txn)
        schema.check_vertex_kind(kind)
        if self.strict_schema and name not in schema.VERTEX_ATTRIBUTES[kind]:
            raise SchemaError(f"unknown property {kind}.{name}")
        self._write_lock(txn, ("V", kind, vid))
        with self._mu:
            props = self._store.vertex(kind, vid).props
            had = name in props
            old = props.get(name)
            props[name] = value
            txn.undo.append(("VP", kind, vid, name, old, had))
            txn.redo.append(["VP", kind, vid, name, value])

    def update_edge_property(self, txn: Transaction, ekind: str, eid: int, name: str, value) -> None:
        self._check_active(txn)
        schema.check_edge_kind(ekind)
        self._write_lock(txn, ("E", ekind, eid))
        with self._mu:
            rec = self._store.edge(ekind, eid)
            if rec.attrs is None:
                rec.attrs = {}
            had = name in rec.attrs
            old = rec.attrs.get(name)
            rec.attrs[name] = value
            txn.undo.append(("EP", ekind, eid, name, old, had))
            txn.redo.append(["EP", ekind, eid, name, value])

    def delete_vertex_cascade(self, txn: Transaction, kind: str, vid: int) -> dict[str, int]:
        """Remove a vertex, its incident edges and (for accounts) attached loans."""
        self._check_active(txn)
        schema.check_vertex_kind(kind)
        self._write_lock(txn, ("V", kind, vid))
        self._lock(txn, ("K", kind), _IX)
        with self._mu:
            self._store.vertex(kind, vid)  # raises if missing

        victims = [(kind, vid)]
        if kind == schema.ACCOUNT:
            with self._mu:
                for ekind, direction in ((schema.DEPOSIT, IN), (schema.REPAY, OUT)):
                    cols = self._store.adjacency(kind, vid, ekind, direction)
                    if cols:
                        for loan in cols.other:
                            if (schema.LOAN, loan) not in victims:
                                victims.append((schema.LOAN, loan))
            for vkind, vvid in victims[1:]:
                self._write_lock(txn, ("V", vkind, vvid))
                self._lock(txn, ("K", vkind), _IX)

        # The victims are X-locked, so their incident edge sets are stable;
        # lock the far endpoints before mutating their adjacency.
        with self._mu:
            edge_ids: list[tuple[str, int]] = []
            endpoints: set[tuple] = set()
            seen: set[tuple[str, int]] = set()
            for vkind, vvid in victims:
                vertex = self._store.vertex(vkind, vvid)
                for (ekind, _direction), cols in vertex.adj.items():
                    for eid in cols.eid:
                        key = (ekind, eid)
                        if key in seen:
                            continue
                        seen.add(key)
                        edge_ids.append(key)
                        rec = self._store.edge(ekind, eid)
                        endpoints.add(("V", rec.src_kind, rec.src))
                        endpoints.add(("V", rec.dst_kind, rec.dst))
        for resource in sorted(endpoints):
            self._write_lock(txn, resource)

        summary: dict[str, int] = {}
        with self._mu:
            store = self._store
            for ekind, eid in edge_ids:
                rec = store.remove_edge(ekind, eid)
                txn.undo.append(
                    ("E-", ekind, eid, rec.src_kind, rec.src, rec.dst_kind, rec.dst, rec.ts, rec.amt, rec.attrs)
                )
                txn.redo.append(["E-", ekind, eid])
                summary[ekind] = summary.get(ekind, 0) + 1
            for vkind, vvid in victims:
                props = store.remove_vertex(vkind, vvid)
                txn.undo.append(("V-", vkind, vvid, props))
                txn.redo.append(["V-", vkind, vvid])
                summary[vkind] = summary.get(vkind, 0) + 1
        return summary

    # -- reads ------------------------------------------------------------------

    def vertex_exists(self, txn: Transaction, kind: str, vid: int) -> bool:
        self._check_active(txn)
        schema.check_vertex_kind(kind)
        resource = ("V", kind, vid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                return self._store.has_vertex(kind, vid)
        finally:
            self._read_release(txn, resource, token)

    def read_prop(self, txn: Transaction, kind: str, vid: int, name: str):
        self._check_active(txn)
        resource = ("V", kind, vid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                props = self._store.vertex(kind, vid).props
                if name not in props:
                    raise MissingEntityError(f"{kind} {vid} has no property {name!r}")
                return props[name]
        finally:
            self._read_release(txn, resource, token)

    def read_props(self, txn: Transaction, kind: str, vid: int) -> dict:
        self._check_active(txn)
        resource = ("V", kind, vid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                return dict(self._store.vertex(kind, vid).props)
        finally:
            self._read_release(txn, resource, token)

    def read_edge_prop(self, txn: Transaction, ekind: str, eid: int, name: str):
        self._check_active(txn)
        resource = ("E", ekind, eid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                attrs = self._store.edge(ekind, eid).attrs or {}
                return attrs.get(name)
        finally:
            self._read_release(txn, resource, token)

    def edge_endpoint_kinds(self, txn: Transaction, ekind: str, eid: int) -> tuple[str, str]:
        self._check_active(txn)
        resource = ("E", ekind, eid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                rec = self._store.edge(ekind, eid)
                return rec.src_kind, rec.dst_kind
        finally:
            self._read_release(txn, resource, token)

    def edges(
        self,
        txn: Transaction,
        kind: str,
        vid: int,
        ekind: str,
        direction: str = OUT,
        window: Optional[tuple[int, int]] = None,
        trunc: Optional[TruncationSpec] = None,
        min_amount_exclusive: Optional[int] = None,
    ) -> EdgeBatch:
        """Matching edges at one vertex: window-filter, truncate, then threshold.

        Window bounds are strict on both ends. Truncation sorts by the spec's
        order (ties by edge id ascending) and keeps the first ``limit`` edges;
        the amount threshold applies to the edges actually traversed.
        """
        self._check_active(txn)
        if window is not None and window[0] > window[1]:
            raise ValueError(f"window start {window[0]} > end {window[1]}")
        resource = ("V", kind, vid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                cols = self._store.adjacency(kind, vid, ekind, direction)
                return self._select(cols, window, trunc, min_amount_exclusive)
        finally:
            self._read_release(txn, resource, token)

    def _select(
        self,
        cols: Optional[EdgeColumns],
        window: Optional[tuple[int, int]],
        trunc: Optional[TruncationSpec],
        min_amount_exclusive: Optional[int],
    ) -> EdgeBatch:
        batch = EdgeBatch()
        if cols is None or not len(cols):
            return batch
        if window is not None:
            lo, hi = kernels.window_bounds(cols.ts, window[0], window[1])
        else:
            lo, hi = 0, len(cols)
        if lo >= hi:
            return batch
        if trunc is not None:
            idx = kernels.truncate_topk(
                cols.ts, cols.amt, cols.eid, lo, hi, int(trunc.order), trunc.limit
            )
            if min_amount_exclusive is not None:
                idx = [i for i in idx if cols.amt[i] > min_amount_exclusive]
        elif min_amount_exclusive is not None:
            idx = kernels.select_amount_gt(cols.amt, lo, hi, min_amount_exclusive)
        else:
            idx = None
        if idx is None:
            batch.ts = list(cols.ts[lo:hi])
            batch.eid = list(cols.eid[lo:hi])
            batch.other = list(cols.other[lo:hi])
            batch.amt = list(cols.amt[lo:hi])
        else:
            batch.ts = [cols.ts[i] for i in idx]
            batch.eid = [cols.eid[i] for i in idx]
            batch.other = [cols.other[i] for i in idx]
            batch.amt = [cols.amt[i] for i in idx]
        return batch

    def agg_edges(
        self,
        txn: Transaction,
        kind: str,
        vid: int,
        ekind: str,
        direction: str,
        window: Optional[tuple[int, int]] = None,
        min_amount_exclusive: int = -1,
    ) -> tuple[int, int, int]:
        """(count, sum, max) of amounts over the full windowed edge set."""
        self._check_active(txn)
        resource = ("V", kind, vid)
        token = self._read_acquire(txn, resource)
        try:
            with self._mu:
                cols = self._store.adjacency(kind, vid, ekind, direction)
                if cols is None or not len(cols):
                    return (0, 0, 0)
                if window is not None:
                    lo, hi = kernels.window_bounds(cols.ts, window[0], window[1])
                else:
                    lo, hi = 0, len(cols)
                return kernels.agg_amount_gt(cols.amt, lo, hi, min_amount_exclusive)
        finally:
            self._read_release(txn, resource, token)

    def neighbors(
        self,
        txn: Transaction,
        kind: str,
        vid: int,
        ekind: str,
        direction: str = OUT,
        window: Optional[tuple[int, int]] = None,
        trunc: Optional[TruncationSpec] = None,
    ) -> list[EdgeView]:
        """Full edge records for one vertex, in selection order."""
        batch = self.edges(txn, kind, vid, ekind, direction, window, trunc)
        views = []
        with self._mu:
            for eid in batch.eid:
                rec = self._store.edge(ekind, eid)
                views.append(
                    EdgeView(ekind, eid, rec.src, rec.dst, rec.ts, rec.amt,
                             dict(rec.attrs) if rec.attrs else None)
                )
        return views

    def scan(self, txn: Transaction, kind: str) -> list[tuple[int, dict]]:
        """All vertices of a kind as (id, props) sorted by id."""
        self._check_active(txn)
        schema.check_vertex_kind(kind)
        container = ("K", kind)
        token = self._read_acquire(txn, container)
        out = []
        try:
            with self._mu:
                ids = sorted(self._store.vertices[kind])
            for vid in ids:
                vtoken = self._read_acquire(txn, ("V", kind, vid))
                try:
                    with self._mu:
                        if self._store.has_vertex(kind, vid):
                            out.append((vid, dict(self._store.vertices[kind][vid].props)))
                finally:
                    self._read_release(txn, ("V", kind, vid), vtoken)
        finally:
            self._read_release(txn, container, token)
        return out

    def vertex_ids(self, txn: Transaction, kind: str) -> list[int]:
        self._check_active(txn)
        container = ("K", kind)
        token = self._read_acquire(txn, container)
        try:
            with self._mu:
                return sorted(self._store.vertices[kind])
        finally:
            self._read_release(txn, container, token)

    # -- introspection -----------------------------------------------------------

    def state_digest(self) -> str:
        """Digest of the full current state; meaningful at quiescence."""
        with self._mu:
            return self._store.digest()

    def counts(self) -> dict[str, int]:
        with self._mu:
            return self._store.counts()

    def iter_records(self) -> list[list]:
        with self._mu:
            return list(self._store.iter_records())
