"""Transactional in-memory property multigraph (the reference SUT)."""

from .engine import EdgeBatch, EdgeView, Engine, IsolationLevel, Transaction, TxnState
from .graph import IN, OUT
from . import schema

__all__ = [
    "EdgeBatch",
    "EdgeView",
    "Engine",
    "IsolationLevel",
    "Transaction",
    "TxnState",
    "IN",
    "OUT",
    "schema",
]
