"""Write-ahead log and snapshot files.

Frame format: 4-byte big-endian payload length, 4-byte CRC32 of the payload,
then the payload (a JSON array). A transaction's effects are durable iff its
commit marker frame is in the log. The file is opened unbuffered and each
commit is flushed with a single write, so a simulated instantaneous failure
(dropping the handle) loses nothing that was acknowledged.

A truncated final frame is a torn tail and is ignored; a full frame with a
bad checksum followed by more data means real corruption and recovery stops
with an error naming the last valid sequence number.
"""

from __future__ import annotations

import json
import os
import struct
import threading
import zlib
from pathlib import Path
from typing import Iterator, Optional

from ..errors import RecoveryError

_HEADER = struct.Struct(">II")

# Record tags: V+/E+ insert, VP/EP property set, V-/E- delete, C commit marker.
COMMIT = "C"


def _frame(payload: bytes) -> bytes:
    return _HEADER.pack(len(payload), zlib.crc32(payload)) + payload


def _encode(record: list) -> bytes:
    return _frame(json.dumps(record, separators=(",", ":")).encode("utf-8"))


def _iter_frames(data: bytes) -> Iterator[tuple[int, list]]:
    """Yield (offset, record) pairs; stop silently at a torn tail."""
    offset = 0
    size = len(data)
    while offset < size:
        if size - offset < _HEADER.size:
            return  # torn header
        length, crc = _HEADER.unpack_from(data, offset)
        body_start = offset + _HEADER.size
        if size - body_start < length:
            return  # torn payload
        body = data[body_start : body_start + length]
        if zlib.crc32(body) != crc:
            if body_start + length < size:
                raise _MidFileCorruption(offset)
            return  # damaged final frame, treat as torn
        try:
            record = json.loads(body)
        except ValueError:
            if body_start + length < size:
                raise _MidFileCorruption(offset) from None
            return
        yield offset, record
        offset = body_start + length


class _MidFileCorruption(Exception):
    def __init__(self, offset: int):
        self.offset = offset


class WalWriter:
    """Appends commit groups; thread safe; assigns global sequence numbers."""

    def __init__(self, path: Path, *, next_seq: int = 1, fsync: bool = False):
        self.path = Path(path)
        self._fsync = fsync
        self._mu = threading.Lock()
        self._next_seq = next_seq
        self._fd = os.open(self.path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)

    def append_commit(self, txn_id: int, ops: list[list]) -> int:
        """Write all of a transaction's redo records plus its commit marker."""
        with self._mu:
            chunks = []
            for op in ops:
                chunks.append(_encode([self._next_seq, txn_id, *op]))
                self._next_seq += 1
            chunks.append(_encode([self._next_seq, txn_id, COMMIT]))
            marker_seq = self._next_seq
            self._next_seq += 1
            os.write(self._fd, b"".join(chunks))
            if self._fsync:
                os.fsync(self._fd)
            return marker_seq

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def close(self) -> None:
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1

    def abandon(self) -> None:
        """Simulated crash: drop the descriptor without any flushing niceties."""
        self.close()


def scan_wal(path: Path) -> tuple[list[tuple[int, list[list]]], int]:
    """Read committed groups in commit-marker order.

    Returns (groups, last_seq) where each group is (txn_id, [records]);
    records include their sequence numbers as the first element. Entries of
    transactions without a commit marker are dropped.
    """
    path = Path(path)
    if not path.exists():
        return [], 0
    data = path.read_bytes()
    pending: dict[int, list[list]] = {}
    groups: list[tuple[int, list[list]]] = []
    last_seq = 0
    try:
        for _, record in _iter_frames(data):
            seq, txn_id, tag = record[0], record[1], record[2]
            last_seq = max(last_seq, seq)
            if tag == COMMIT:
                groups.append((txn_id, pending.pop(txn_id, [])))
            else:
                pending.setdefault(txn_id, []).append(record)
    except _MidFileCorruption as exc:
        raise RecoveryError(
            f"corrupt log frame at byte {exc.offset} of {path}", last_seq
        ) from None
    return groups, last_seq


def snapshot_path(wal_path: Path) -> Path:
    return Path(str(wal_path) + ".snapshot")


def write_snapshot(
    wal_path: Path, last_seq: int, counters: dict[str, int], records: Iterator[list]
) -> None:
    """Atomically write a full-state snapshot covering sequences <= last_seq."""
    target = snapshot_path(wal_path)
    tmp = target.with_suffix(target.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_encode(["SNAP", last_seq, counters]))
        for record in records:
            fh.write(_encode(record))
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, target)


def read_snapshot(wal_path: Path) -> Optional[tuple[int, dict[str, int], list[list]]]:
    """Load (last_seq, counters, records) or None when no snapshot exists."""
    target = snapshot_path(wal_path)
    if not target.exists():
        return None
    data = target.read_bytes()
    records = []
    header = None
    try:
        for _, record in _iter_frames(data):
            if header is None:
                if record[0] != "SNAP":
                    raise RecoveryError(f"bad snapshot header in {target}", 0)
                header = record
            else:
                records.append(record)
    except _MidFileCorruption as exc:
        raise RecoveryError(
            f"corrupt snapshot frame at byte {exc.offset} of {target}", 0
        ) from None
    if header is None:
        raise RecoveryError(f"empty snapshot file {target}", 0)
    return header[1], header[2], records


def rewrite_wal(path: Path, keep_after_seq: int) -> None:
    """Drop frames with seq <= keep_after_seq (they are covered by a snapshot)."""
    path = Path(path)
    if not path.exists():
        return
    data = path.read_bytes()
    kept = []
    try:
        for _, record in _iter_frames(data):
            if record[0] > keep_after_seq:
                kept.append(_encode(record))
    except _MidFileCorruption:
        pass  # checkpoint keeps whatever is readable; recovery reports the rest
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(b"".join(kept))
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
