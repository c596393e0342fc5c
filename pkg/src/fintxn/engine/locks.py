"""Two-phase locking with shared/exclusive/intent modes and deadlock detection.

Deadlocks are found by a wait-for-graph cycle check run whenever a request
blocks; the youngest transaction in the cycle is doomed and surfaces a
`SerializationConflict` from its pending acquire. Every transaction in a
cycle is necessarily blocked, so dooming plus a broadcast wake-up is enough
to break it.
"""

from __future__ import annotations

import threading
from enum import Enum
from typing import Optional

from ..errors import SerializationConflict

Resource = tuple


class LockMode(Enum):
    SHARED = "S"
    EXCLUSIVE = "X"
    INTENT_EXCLUSIVE = "IX"  # container mode for inserts, conflicts with scans


_COMPATIBLE = {
    (LockMode.SHARED, LockMode.SHARED): True,
    (LockMode.SHARED, LockMode.INTENT_EXCLUSIVE): False,
    (LockMode.SHARED, LockMode.EXCLUSIVE): False,
    (LockMode.INTENT_EXCLUSIVE, LockMode.SHARED): False,
    (LockMode.INTENT_EXCLUSIVE, LockMode.INTENT_EXCLUSIVE): True,
    (LockMode.INTENT_EXCLUSIVE, LockMode.EXCLUSIVE): False,
    (LockMode.EXCLUSIVE, LockMode.SHARED): False,
    (LockMode.EXCLUSIVE, LockMode.INTENT_EXCLUSIVE): False,
    (LockMode.EXCLUSIVE, LockMode.EXCLUSIVE): False,
}


def _covers(held: set[LockMode], want: LockMode) -> bool:
    if want in held or LockMode.EXCLUSIVE in held:
        return True
    return False


class LockManager:
    """Resource lock table shared by all transactions of one engine."""

    def __init__(self, wait_timeout: float = 30.0):
        self._cond = threading.Condition()
        self._holders: dict[Resource, dict[int, set[LockMode]]] = {}
        self._held_by_txn: dict[int, set[Resource]] = {}
        self._waiting_for: dict[int, set[int]] = {}
        self._txns: dict[int, object] = {}  # txn_id -> Transaction (for dooming)
        self._wait_timeout = wait_timeout

    def acquire(self, txn, resource: Resource, mode: LockMode) -> Optional[LockMode]:
        """Block until ``mode`` is granted; return the newly added mode.

        Returns None when the transaction already held a covering mode (the
        caller then must not release anything). Raises SerializationConflict
        when the transaction is doomed as a deadlock victim or the wait
        times out.
        """
        with self._cond:
            self._txns[txn.txn_id] = txn
            while True:
                if txn.doomed:
                    self._waiting_for.pop(txn.txn_id, None)
                    raise SerializationConflict(
                        f"transaction {txn.txn_id} chosen as deadlock victim"
                    )
                holders = self._holders.get(resource)
                mine = holders.get(txn.txn_id, set()) if holders else set()
                if _covers(mine, mode):
                    self._waiting_for.pop(txn.txn_id, None)
                    return None
                blockers = set()
                if holders:
                    for other, modes in holders.items():
                        if other == txn.txn_id:
                            continue
                        if any(not _COMPATIBLE[(mode, m)] for m in modes):
                            blockers.add(other)
                if not blockers:
                    if holders is None:
                        holders = {}
                        self._holders[resource] = holders
                    holders.setdefault(txn.txn_id, set()).add(mode)
                    self._held_by_txn.setdefault(txn.txn_id, set()).add(resource)
                    self._waiting_for.pop(txn.txn_id, None)
                    return mode
                self._waiting_for[txn.txn_id] = blockers
                cycle = self._find_cycle(txn.txn_id)
                if cycle:
                    victim_id = max(cycle)
                    victim = self._txns.get(victim_id)
                    if victim is not None:
                        victim.doomed = True
                    self._cond.notify_all()
                    if victim_id == txn.txn_id:
                        continue  # loop re-checks the doomed flag and raises
                if not self._cond.wait(timeout=self._wait_timeout):
                    self._waiting_for.pop(txn.txn_id, None)
                    raise SerializationConflict(
                        f"transaction {txn.txn_id} lock wait timed out on {resource!r}"
                    )

    def release_mode(self, txn, resource: Resource, mode: LockMode) -> None:
        """Drop one mode (short read locks); keeps other modes in place."""
        with self._cond:
            holders = self._holders.get(resource)
            if not holders:
                return
            modes = holders.get(txn.txn_id)
            if not modes:
                return
            modes.discard(mode)
            if not modes:
                del holders[txn.txn_id]
                held = self._held_by_txn.get(txn.txn_id)
                if held:
                    held.discard(resource)
            if not holders:
                del self._holders[resource]
            self._cond.notify_all()

    def release_all(self, txn) -> None:
        with self._cond:
            for resource in self._held_by_txn.pop(txn.txn_id, ()):
                holders = self._holders.get(resource)
                if holders and txn.txn_id in holders:
                    del holders[txn.txn_id]
                    if not holders:
                        del self._holders[resource]
            self._waiting_for.pop(txn.txn_id, None)
            self._txns.pop(txn.txn_id, None)
            self._cond.notify_all()

    def _find_cycle(self, start: int) -> Optional[list[int]]:
        """Path of txn ids forming a wait-for cycle through ``start``, if any."""
        graph = self._waiting_for
        stack = [(start, iter(graph.get(start, ())))]
        on_path = [start]
        visited = {start}
        while stack:
            node, children = stack[-1]
            advanced = False
            for nxt in children:
                if nxt == start:
                    return list(on_path)
                if nxt in visited:
                    continue
                visited.add(nxt)
                on_path.append(nxt)
                stack.append((nxt, iter(graph.get(nxt, ()))))
                advanced = True
                break
            if not advanced:
                stack.pop()
                on_path.pop()
        return None
