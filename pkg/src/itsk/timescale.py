"""UTC <-> TAI conversion over Ts64Frac integers.

Store TAI internally (a linear scale: no 23:59:60, no 61-second minutes) and
convert to UTC at the edges.  Offsets are applied by civil carry arithmetic
on the decimal encoding, so no epoch convention is involved.

The leap-second table is a list of ``(effective UTC date, TAI-UTC seconds)``.
Before the first entry the offset is taken as 0; UTC before 1972 was not
defined with integer offsets, so conversions there are outside the table's
domain and only kept total for convenience.

At a +1 step effective on date ``E`` with new offset ``k``::

    UTC (E-1) 23:59:59  ->  TAI  E 00:00:00 + (k - 2)
    UTC (E-1) 23:59:60  ->  TAI  E 00:00:00 + (k - 1)     (the inserted second)
    UTC  E    00:00:00  ->  TAI  E 00:00:00 + k

Steps larger than one second (only possible in user tables) leave a gap of
TAI instants with no UTC preimage; :func:`tai_to_utc` maps those with the
previous offset.  Negative steps are rejected when the table is built.
"""

from __future__ import annotations

import io
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

from . import _civil
from .codec import FRAC_PER_SECOND, date_to_int, int_to_date, ts64frac_to_datetime
from .errors import InvalidDateError, InvalidEncodingError, LeapSecondError, LeapTableParseError, NonMonotoneTableError

__all__ = [
    "BUILTIN_LEAP_SECONDS",
    "LeapSecondTable",
    "builtin_table",
    "default_table",
    "install_table",
    "load_leap_table",
    "read_leap_table",
    "utc_to_tai",
    "tai_to_utc",
]

ENV_VAR = "ITSK_LEAP_TABLE"

# IERS Bulletin C history; the last step took effect 2017-01-01.
BUILTIN_LEAP_SECONDS: tuple[tuple[int, int], ...] = (
    (19720101, 10),
    (19720701, 11),
    (19730101, 12),
    (19740101, 13),
    (19750101, 14),
    (19760101, 15),
    (19770101, 16),
    (19780101, 17),
    (19790101, 18),
    (19800101, 19),
    (19810701, 20),
    (19820701, 21),
    (19830701, 22),
    (19850701, 23),
    (19880101, 24),
    (19900101, 25),
    (19910101, 26),
    (19920701, 27),
    (19930701, 28),
    (19940701, 29),
    (19960101, 30),
    (19970701, 31),
    (19990101, 32),
    (20060101, 33),
    (20090101, 34),
    (20120701, 35),
    (20150701, 36),
    (20170101, 37),
)

_DAY = 10**6 * FRAC_PER_SECOND  # one day-digit step in a Ts64Frac


@dataclass(frozen=True)
class LeapSecondTable:
    entries: tuple[tuple[int, int], ...]
    source: str = "builtin"
    _dates: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _tai_starts: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple((int(d), int(k)) for d, k in self.entries)
        if not entries:
            raise NonMonotoneTableError("leap-second table is empty")
        prev_date, prev_off = 0, 0
        for d, k in entries:
            try:
                int_to_date(d)
            except InvalidEncodingError as exc:
                raise NonMonotoneTableError(f"bad effective date {d}") from exc
            if d <= prev_date:
                raise NonMonotoneTableError(f"dates not strictly increasing at {d}")
            if k < prev_off:
                raise NonMonotoneTableError(f"negative leap step at {d}: {prev_off} -> {k}")
            prev_date, prev_off = d, k
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_dates", tuple(d for d, _ in entries))
        starts = tuple(_civil.shift_seconds(d * _DAY, k) for d, k in entries)
        object.__setattr__(self, "_tai_starts", starts)

    def __len__(self) -> int:
        return len(self.entries)

    def offset_at(self, utc_date: int) -> int:
        """TAI-UTC in effect on a UTC day (``YYYYMMDD``)."""
        i = bisect_right(self._dates, utc_date) - 1
        return self.entries[i][1] if i >= 0 else 0

    def step(self, i: int) -> int:
        prev = self.entries[i - 1][1] if i > 0 else 0
        return self.entries[i][1] - prev

    def leap_second_days(self) -> list[int]:
        """UTC days that end with an inserted 23:59:60."""
        return [_civil.previous_day(d) for i, (d, _) in enumerate(self.entries) if self.step(i) == 1]


def load_leap_table(source: BinaryIO | bytes | str, name: str = "stream") -> LeapSecondTable:
    """Parse ``YYYYMMDD,<offset>`` lines; ``#`` lines and blank lines are skipped."""
    if isinstance(source, str):
        source = source.encode()
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    try:
        text = source.read().decode("utf-8")
    except UnicodeDecodeError as exc:
        line = exc.object[: exc.start].count(b"\n") + 1
        raise LeapTableParseError(f"not UTF-8: {exc.reason}", line) from exc
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise LeapTableParseError("expected 'YYYYMMDD,offset'", lineno, 1)
        date_s, off_s = parts[0].strip(), parts[1].strip()
        if len(date_s) != 8 or not date_s.isdigit():
            raise LeapTableParseError(f"bad date field {parts[0]!r}", lineno, 1)
        try:
            date_to_int((int(date_s[:4]), int(date_s[4:6]), int(date_s[6:])))
        except InvalidDateError:
            raise LeapTableParseError(f"invalid calendar date {date_s}", lineno, 1) from None
        try:
            offset = int(off_s)
        except ValueError:
            raise LeapTableParseError(f"bad offset field {parts[1]!r}", lineno, len(parts[0]) + 2) from None
        entries.append((int(date_s), offset))
    if not entries:
        raise LeapTableParseError("no entries", line=1)
    return LeapSecondTable(tuple(entries), source=name)


def read_leap_table(path: str | os.PathLike) -> LeapSecondTable:
    with open(path, "rb") as fh:
        return load_leap_table(fh, name=str(Path(path)))


_BUILTIN = LeapSecondTable(BUILTIN_LEAP_SECONDS)
_installed: LeapSecondTable = _BUILTIN


def builtin_table() -> LeapSecondTable:
    return _BUILTIN


def default_table() -> LeapSecondTable:
    return _installed


def install_table(table: LeapSecondTable | None) -> LeapSecondTable:
    """Make ``table`` the default for later conversions (``None`` restores the built-in).

    Returns the previously installed table.
    """
    global _installed
    previous = _installed
    _installed = table if table is not None else _BUILTIN
    return previous


def utc_to_tai(t: int, table: LeapSecondTable | None = None) -> int:
    """Convert a UTC Ts64Frac to TAI, accepting 23:59:60 on leap days."""
    if table is None:
        table = _installed
    dt = ts64frac_to_datetime(t, allow_leap_second=True)
    if dt.second == 60:
        day = t // _DAY
        effective = _civil.next_day(day) if day < 99991231 else 0
        i = bisect_right(table._dates, effective) - 1
        if dt.hour != 23 or dt.minute != 59 or i < 0 or table._dates[i] != effective or table.step(i) != 1:
            raise LeapSecondError(f"{t} is not an inserted leap second in table {table.source}")
        # 23:59:60 sits exactly one second after 23:59:59 on the TAI side
        return _civil.shift_seconds(t - FRAC_PER_SECOND, table.entries[i][1])
    return _civil.shift_seconds(t, table.offset_at(t // _DAY))


def tai_to_utc(t: int, table: LeapSecondTable | None = None) -> int:
    """Convert a TAI Ts64Frac to UTC; the inserted TAI second decodes to 23:59:60."""
    if table is None:
        table = _installed
    ts64frac_to_datetime(t)
    j = bisect_right(table._tai_starts, t)
    if j < len(table) and table.step(j) == 1 and t >= table._tai_starts[j] - FRAC_PER_SECOND:
        frac = t % FRAC_PER_SECOND
        leap_day = _civil.previous_day(table._dates[j])
        return leap_day * _DAY + 235960 * FRAC_PER_SECOND + frac
    offset = table.entries[j - 1][1] if j > 0 else 0
    return _civil.shift_seconds(t, -offset)


def table_from_env() -> LeapSecondTable:
    path = os.environ.get(ENV_VAR)
    return read_leap_table(path) if path else _BUILTIN

