"""Workload operations and their parameter schemas.

READ_SPECS maps operation names to (function, parameter table); parameter
types tag how values (de)serialize in parameter files: ``id``/``int`` plain
integers, ``millis`` canonical datetimes, ``cents`` two-decimal amounts,
``float`` decimal text, ``order`` a truncation order name. A trailing
(truncationLimit, truncationOrder) pair is folded into a TruncationSpec.
"""

from __future__ import annotations

from ..core import TruncationOrder, TruncationSpec
from . import queries, readwrite, writes
from .queries import (
    tcr1, tcr2, tcr3, tcr4, tcr5, tcr6, tcr7, tcr8, tcr9, tcr10, tcr11, tcr12,
    tsr1, tsr2, tsr3, tsr4, tsr5, tsr6,
)
from .readwrite import trw1, trw2, trw3
from .writes import WRITE_SPECS, apply_write

_WINDOW = (("startTime", "millis"), ("endTime", "millis"))
_TRUNC = (("truncationLimit", "int"), ("truncationOrder", "order"))

READ_SPECS = {
    "tcr1": (tcr1, (("id", "id"),) + _WINDOW + _TRUNC),
    "tcr2": (tcr2, (("id", "id"),) + _WINDOW + _TRUNC),
    "tcr3": (tcr3, (("id1", "id"), ("id2", "id")) + _WINDOW),
    "tcr4": (tcr4, (("id1", "id"), ("id2", "id")) + _WINDOW),
    "tcr5": (tcr5, (("id", "id"),) + _WINDOW + _TRUNC),
    "tcr6": (tcr6, (("id", "id"), ("threshold1", "cents"), ("threshold2", "cents")) + _WINDOW + _TRUNC),
    "tcr7": (tcr7, (("id", "id"), ("threshold", "cents")) + _WINDOW + _TRUNC),
    "tcr8": (tcr8, (("id", "id"), ("threshold", "float")) + _WINDOW + _TRUNC),
    "tcr9": (tcr9, (("id", "id"), ("threshold", "cents")) + _WINDOW + _TRUNC),
    "tcr10": (tcr10, (("pid1", "id"), ("pid2", "id")) + _WINDOW),
    "tcr11": (tcr11, (("id", "id"),) + _WINDOW + _TRUNC),
    "tcr12": (tcr12, (("id", "id"),) + _WINDOW + _TRUNC),
    "tsr1": (tsr1, (("id", "id"),)),
    "tsr2": (tsr2, (("id", "id"),) + _WINDOW),
    "tsr3": (tsr3, (("id", "id"), ("threshold", "cents")) + _WINDOW),
    "tsr4": (tsr4, (("id", "id"), ("threshold", "cents")) + _WINDOW),
    "tsr5": (tsr5, (("id", "id"), ("threshold", "cents")) + _WINDOW),
    "tsr6": (tsr6, (("id", "id"),) + _WINDOW),
}

READ_KINDS = tuple(READ_SPECS)
WRITE_KINDS = tuple(WRITE_SPECS)
RW_KINDS = ("trw1", "trw2", "trw3")


def run_read(engine, txn, kind: str, params: tuple):
    """Execute a read operation with positional params per READ_SPECS.

    When the spec ends with the truncation pair, the two trailing values
    (limit, order) are combined into a TruncationSpec.
    """
    fn, spec = READ_SPECS[kind]
    args = list(params)
    if spec[-1][0] == "truncationOrder":
        order = args.pop()
        limit = args.pop()
        if isinstance(order, str):
            order = TruncationOrder.parse(order)
        args.append(TruncationSpec(int(limit), order))
    return fn(engine, txn, *args)


__all__ = [
    "READ_SPECS",
    "READ_KINDS",
    "WRITE_SPECS",
    "WRITE_KINDS",
    "RW_KINDS",
    "apply_write",
    "run_read",
    "queries",
    "writes",
    "readwrite",
    "trw1",
    "trw2",
    "trw3",
]
