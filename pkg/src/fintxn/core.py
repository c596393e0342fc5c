"""Shared value types: timestamps, fixed-point money, rounding and path rules.

All types here are immutable values and safe to share between worker threads.
Timestamps are milliseconds since the Unix epoch (UTC, 64-bit signed); money
is an integer count of cents so sums and maxima stay exact. Ratios are built
with ``fractions.Fraction`` and only rounded once, at the edge, by `round3`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import FormatError

Path = tuple[int, ...]

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

#: Largest representable timestamp: 9999-12-31T23:59:59.999.
MAX_TIMESTAMP_MILLIS = int(
    (datetime(9999, 12, 31, 23, 59, 59, 999000, tzinfo=timezone.utc) - _EPOCH)
    / timedelta(milliseconds=1)
)

_DATETIME_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})\.(\d{3})([+-]\d{4})$"
)

Rational = Union[int, Fraction, Decimal, float]


def round3(x: Rational) -> Decimal:
    """Round a finite rational to exactly three decimal places, half up.

    "Half up" applies to the magnitude (half away from zero), and the result
    always carries three fractional digits, e.g. ``Decimal('2.500')``. The
    computation is exact scaled-integer arithmetic; binary floats are first
    converted to their exact rational value.
    """
    f = Fraction(x)
    sign = -1 if f < 0 else 1
    scaled = abs(f) * 1000 + Fraction(1, 2)
    units = scaled.numerator // scaled.denominator
    return Decimal(sign * units).scaleb(-3)


def format_money(cents: int) -> str:
    """Render integer cents with exactly two decimal places."""
    sign = "-" if cents < 0 else ""
    units, frac = divmod(abs(cents), 100)
    return f"{sign}{units}.{frac:02d}"


def parse_money(text: str) -> int:
    """Parse a two-decimal amount into integer cents."""
    m = re.fullmatch(r"(-?)(\d+)\.(\d{2})", text)
    if not m:
        raise FormatError("amount", f"expected a two-decimal amount, got {text!r}")
    sign, units, frac = m.groups()
    cents = int(units) * 100 + int(frac)
    return -cents if sign else cents


def format_datetime(millis: int) -> str:
    """Render a timestamp as ``yyyy-mm-ddTHH:MM:ss.sss+0000`` (28 chars, UTC)."""
    if not 0 <= millis <= MAX_TIMESTAMP_MILLIS:
        raise FormatError("year", f"timestamp {millis} outside years 1970-9999")
    secs, ms = divmod(millis, 1000)
    dt = _EPOCH + timedelta(seconds=secs)
    return (
        f"{dt.year:04d}-{dt.month:02d}-{dt.day:02d}"
        f"T{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d}.{ms:03d}+0000"
    )


def parse_datetime(text: str) -> int:
    """Inverse of `format_datetime`; rejects anything but the exact format."""
    m = _DATETIME_RE.fullmatch(text)
    if not m:
        raise FormatError("format", f"not a canonical datetime: {text!r}")
    year, month, day, hour, minute, second, ms, zone = m.groups()
    if zone != "+0000":
        raise FormatError("zone", f"timezone must be +0000, got {zone!r}")
    if not 1970 <= int(year) <= 9999:
        raise FormatError("year", f"year {year} outside 1970-9999")
    if not 1 <= int(month) <= 12:
        raise FormatError("month", f"invalid month {month}")
    if not 0 <= int(hour) <= 23:
        raise FormatError("hour", f"invalid hour {hour}")
    if not 0 <= int(minute) <= 59:
        raise FormatError("minute", f"invalid minute {minute}")
    if not 0 <= int(second) <= 59:
        raise FormatError("second", f"invalid second {second}")
    try:
        dt = datetime(int(year), int(month), int(day), tzinfo=timezone.utc)
    except ValueError:
        raise FormatError("day", f"invalid day {day} for {year}-{month}") from None
    days = (dt - _EPOCH).days
    return (
        ((days * 24 + int(hour)) * 60 + int(minute)) * 60 + int(second)
    ) * 1000 + int(ms)


class TruncationOrder(IntEnum):
    """Sort order applied to a vertex's edges before truncating to a limit."""

    TIMESTAMP_ASCENDING = 0
    TIMESTAMP_DESCENDING = 1
    AMOUNT_ASCENDING = 2
    AMOUNT_DESCENDING = 3

    @classmethod
    def parse(cls, name: str) -> "TruncationOrder":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise FormatError("truncationOrder", f"unknown order {name!r}") from None


@dataclass(frozen=True)
class TruncationSpec:
    """Per-hop traversal cap: keep the first ``limit`` edges in ``order``."""

    limit: int
    order: TruncationOrder = TruncationOrder.TIMESTAMP_DESCENDING

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError(f"truncation limit must be >= 1, got {self.limit}")


def canonicalize_paths(paths: Iterable[Sequence[int]]) -> list[Path]:
    """Dedupe and order paths: longest first, lexicographic vertex ids within a length.

    Path equality ignores edge identities entirely; a path is its vertex-id
    sequence. The lexicographic tie-break pins a canonical order for
    validation where the underlying result order is not deterministic.
    """
    unique = {tuple(p) for p in paths}
    return sorted(unique, key=lambda p: (-len(p), p))
