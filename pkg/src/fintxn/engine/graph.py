"""In-memory property multigraph with timestamp-ordered adjacency columns.

Adjacency is stored per (vertex, edge kind, direction) as four parallel
``array('q')`` columns (timestamp, edge id, other endpoint, amount in cents)
kept sorted by (timestamp, edge id). The columns expose the buffer protocol
so the compiled kernels can scan them without copying. This layer knows
nothing about transactions or locks; the engine provides those.
"""

from __future__ import annotations

import hashlib
import json
from array import array
from bisect import bisect_left, bisect_right
from typing import Iterator, Optional

from ..errors import (
    DuplicateEntityError,
    MissingEntityError,
    MultiplicityError,
    SchemaError,
)
from . import schema

OUT = "out"
IN = "in"


class EdgeColumns:
    """One direction of one edge kind at one vertex, (ts, eid)-sorted."""

    __slots__ = ("ts", "eid", "other", "amt")

    def __init__(self):
        self.ts = array("q")
        self.eid = array("q")
        self.other = array("q")
        self.amt = array("q")

    def __len__(self) -> int:
        return len(self.ts)

    def insert(self, ts: int, eid: int, other: int, amt: int) -> None:
        idx = bisect_right(self.ts, ts)
        while idx > 0 and self.ts[idx - 1] == ts and self.eid[idx - 1] > eid:
            idx -= 1
        self.ts.insert(idx, ts)
        self.eid.insert(idx, eid)
        self.other.insert(idx, other)
        self.amt.insert(idx, amt)

    def remove(self, ts: int, eid: int) -> None:
        idx = bisect_left(self.ts, ts)
        while idx < len(self.ts) and self.ts[idx] == ts:
            if self.eid[idx] == eid:
                del self.ts[idx]
                del self.eid[idx]
                del self.other[idx]
                del self.amt[idx]
                return
            idx += 1
        raise MissingEntityError(f"edge {eid} at t={ts} not in adjacency list")

    def find_other(self, other: int) -> bool:
        return other in self.other


class EdgeRec:
    """Full edge record; adjacency columns are a projection of these."""

    __slots__ = ("eid", "src_kind", "src", "dst_kind", "dst", "ts", "amt", "attrs")

    def __init__(self, eid, src_kind, src, dst_kind, dst, ts, amt, attrs):
        self.eid = eid
        self.src_kind = src_kind
        self.src = src
        self.dst_kind = dst_kind
        self.dst = dst
        self.ts = ts
        self.amt = amt
        self.attrs = attrs


class _Vertex:
    __slots__ = ("vid", "props", "adj")

    def __init__(self, vid: int, props: dict):
        self.vid = vid
        self.props = props
        self.adj: dict[tuple[str, str], EdgeColumns] = {}


class GraphStore:
    """Unsynchronized committed/current state; callers serialize access."""

    def __init__(self):
        self.vertices: dict[str, dict[int, _Vertex]] = {k: {} for k in schema.VERTEX_KINDS}
        self.edges: dict[str, dict[int, EdgeRec]] = {k: {} for k in schema.EDGE_KINDS}
        self.counters: dict[str, int] = {k: 1 for k in schema.EDGE_KINDS}

    # -- vertices ---------------------------------------------------------

    def vertex(self, kind: str, vid: int) -> _Vertex:
        try:
            return self.vertices[kind][vid]
        except KeyError:
            raise MissingEntityError(f"{kind} {vid} does not exist") from None

    def has_vertex(self, kind: str, vid: int) -> bool:
        return vid in self.vertices[kind]

    def add_vertex(self, kind: str, vid: int, props: dict) -> None:
        table = self.vertices[kind]
        if vid in table:
            raise DuplicateEntityError(f"{kind} {vid} already exists")
        table[vid] = _Vertex(vid, props)

    def remove_vertex(self, kind: str, vid: int) -> dict:
        v = self.vertex(kind, vid)
        for columns in v.adj.values():
            if len(columns):
                raise SchemaError(f"cannot remove {kind} {vid}: edges still attached")
        del self.vertices[kind][vid]
        return v.props

    def set_vertex_prop(self, kind: str, vid: int, name: str, value) -> object:
        v = self.vertex(kind, vid)
        old = v.props.get(name)
        v.props[name] = value
        return old

    # -- edges ------------------------------------------------------------

    def adjacency(self, kind: str, vid: int, ekind: str, direction: str) -> Optional[EdgeColumns]:
        return self.vertex(kind, vid).adj.get((ekind, direction))

    def add_edge(
        self,
        ekind: str,
        eid: int,
        src_kind: str,
        src: int,
        dst_kind: str,
        dst: int,
        ts: int,
        amt: int,
        attrs: Optional[dict],
    ) -> None:
        table = self.edges[ekind]
        if eid in table:
            raise DuplicateEntityError(f"{ekind} edge {eid} already exists")
        sv = self.vertex(src_kind, src)
        dv = self.vertex(dst_kind, dst)
        table[eid] = EdgeRec(eid, src_kind, src, dst_kind, dst, ts, amt, attrs)
        out_cols = sv.adj.get((ekind, OUT))
        if out_cols is None:
            out_cols = sv.adj[(ekind, OUT)] = EdgeColumns()
        out_cols.insert(ts, eid, dst, amt)
        in_cols = dv.adj.get((ekind, IN))
        if in_cols is None:
            in_cols = dv.adj[(ekind, IN)] = EdgeColumns()
        in_cols.insert(ts, eid, src, amt)
        if eid >= self.counters[ekind]:
            self.counters[ekind] = eid + 1

    def remove_edge(self, ekind: str, eid: int) -> EdgeRec:
        rec = self.edge(ekind, eid)
        self.vertex(rec.src_kind, rec.src).adj[(ekind, OUT)].remove(rec.ts, eid)
        self.vertex(rec.dst_kind, rec.dst).adj[(ekind, IN)].remove(rec.ts, eid)
        del self.edges[ekind][eid]
        return rec

    def edge(self, ekind: str, eid: int) -> EdgeRec:
        try:
            return self.edges[ekind][eid]
        except KeyError:
            raise MissingEntityError(f"{ekind} edge {eid} does not exist") from None

    def set_edge_prop(self, ekind: str, eid: int, name: str, value) -> object:
        rec = self.edge(ekind, eid)
        if rec.attrs is None:
            rec.attrs = {}
        old = rec.attrs.get(name)
        rec.attrs[name] = value
        return old

    def check_multiplicity(self, ekind: str, src_kind: str, src: int, dst_kind: str, dst: int) -> None:
        if ekind in schema.MULTIPLICITY_ONE:
            cols = self.vertex(src_kind, src).adj.get((ekind, OUT))
            if cols is not None and cols.find_other(dst):
                raise MultiplicityError(
                    f"{ekind} admits one edge per (src, dst); {src}->{dst} exists"
                )
        if ekind in schema.UNIQUE_IN_EDGE:
            cols = self.vertex(dst_kind, dst).adj.get((ekind, IN))
            if cols is not None and len(cols):
                raise MultiplicityError(
                    f"{dst_kind} {dst} already has a {ekind} in-edge"
                )

    # -- whole-state operations --------------------------------------------

    def iter_records(self) -> Iterator[list]:
        """Canonical record stream for snapshots and digests."""
        for kind in schema.VERTEX_KINDS:
            table = self.vertices[kind]
            for vid in sorted(table):
                yield ["V+", kind, vid, table[vid].props]
        for ekind in schema.EDGE_KINDS:
            table = self.edges[ekind]
            for eid in sorted(table):
                r = table[eid]
                yield ["E+", ekind, eid, r.src_kind, r.src, r.dst_kind, r.dst, r.ts, r.amt, r.attrs]

    def digest(self) -> str:
        h = hashlib.sha256()
        for record in self.iter_records():
            h.update(json.dumps(record, sort_keys=True, separators=(",", ":")).encode())
        return h.hexdigest()

    def counts(self) -> dict[str, int]:
        out = {k: len(t) for k, t in self.vertices.items()}
        out.update({k: len(t) for k, t in self.edges.items()})
        return out
