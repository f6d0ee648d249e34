"""Integer timestamp formats.

Three decimal-positional formats, where the decimal digits of the integer
spell out the calendar fields, plus one binary bit-field layout:

==========  ==========================  ==============================
format      digits / layout             example
==========  ==========================  ==============================
Ts32        YYYYMMDD                    20231027
Ts64Sec     YYYYMMDDhhmmss              20230101120000
Ts64Frac    YYYYMMDDhhmmssXXXXX         2024010100000000000
PackedTs64  8|8|8|8|8|8|16 bit fields   0x170A1B0D22370000
==========  ==========================  ==============================

``XXXXX`` counts units of 10 microseconds.  All values are zone-naive
instants on the proleptic Gregorian calendar, years 1..9999.  Every encoder
and decoder here rejects ``second == 60``; leap-second instants are handled
by :mod:`itsk.timescale` only.
"""

from __future__ import annotations

import enum
from calendar import isleap
from typing import NamedTuple

from .errors import (
    InvalidDateError,
    InvalidDatetimeError,
    InvalidEncodingError,
    NonzeroFractionError,
    UnitFinerThanFormatError,
    YearOutOfCenturyError,
)

__all__ = [
    "CivilDate",
    "CivilDateTime",
    "Format",
    "date_to_int",
    "int_to_date",
    "datetime_to_ts64sec",
    "ts64sec_to_datetime",
    "datetime_to_ts64frac",
    "ts64frac_to_datetime",
    "pack_ts64",
    "unpack_ts64",
    "unpack_fields",
    "truncate",
    "split_date_time",
    "day_key",
    "encode",
    "decode",
    "is_valid",
]

FRAC_PER_SECOND = 100_000
PACKED_FRAC_PER_SECOND = 65_536
DEFAULT_CENTURY_BASE = 2000

_DAYS_IN_MONTH = (0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


class CivilDate(NamedTuple):
    year: int
    month: int
    day: int


class CivilDateTime(NamedTuple):
    """Calendar date and time of day; tuple order is chronological order."""

    year: int
    month: int
    day: int
    hour: int = 0
    minute: int = 0
    second: int = 0
    frac_1e5: int = 0

    @property
    def date(self) -> CivilDate:
        return CivilDate(self.year, self.month, self.day)

    def truncated(self) -> "CivilDateTime":
        """Same instant with the sub-second fraction dropped."""
        return self._replace(frac_1e5=0)


class Format(enum.Enum):
    TS32 = "ts32"
    TS64SEC = "ts64sec"
    TS64FRAC = "ts64frac"

    @classmethod
    def parse(cls, name: "str | Format") -> "Format":
        if isinstance(name, Format):
            return name
        key = name.lower()
        aliases = {"sec": cls.TS64SEC, "frac": cls.TS64FRAC, "date": cls.TS32}
        if key in aliases:
            return aliases[key]
        return cls(key)


# unit -> decimal place value, per format; coarsest first
_PLACE = {
    Format.TS32: {"month": 100, "day": 1},
    Format.TS64SEC: {
        "month": 10**8,
        "day": 10**6,
        "hour": 10**4,
        "minute": 10**2,
        "second": 1,
    },
}
_PLACE[Format.TS64FRAC] = {u: p * FRAC_PER_SECOND for u, p in _PLACE[Format.TS64SEC].items()}
UNITS = ("month", "day", "hour", "minute", "second")


def _valid_date(y: int, m: int, d: int) -> bool:
    if not (1 <= y <= 9999 and 1 <= m <= 12 and d >= 1):
        return False
    if d <= 28:
        return True
    if m == 2:
        return d <= (29 if isleap(y) else 28)
    return d <= _DAYS_IN_MONTH[m]


def _valid_time(h: int, mi: int, s: int, allow_leap_second: bool) -> bool:
    return 0 <= h <= 23 and 0 <= mi <= 59 and (0 <= s <= 59 or (allow_leap_second and s == 60))


def _check_int(t: int) -> None:
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise InvalidEncodingError(f"not a non-negative integer: {t!r}")


# -- Ts32 -------------------------------------------------------------------


def date_to_int(d: CivilDate | tuple[int, int, int]) -> int:
    """``year * 10000 + month * 100 + day``."""
    y, m, dd = d
    if not _valid_date(y, m, dd):
        raise InvalidDateError(f"invalid date: {y:04d}-{m:02d}-{dd:02d}")
    return y * 10_000 + m * 100 + dd


def int_to_date(t: int) -> CivilDate:
    _check_int(t)
    y, md = divmod(t, 10_000)
    m, d = divmod(md, 100)
    if not _valid_date(y, m, d):
        raise InvalidEncodingError(f"not a valid YYYYMMDD encoding: {t}")
    return CivilDate(y, m, d)


# -- Ts64Sec / Ts64Frac -----------------------------------------------------


def _compose_seconds(dt: CivilDateTime, allow_leap_second: bool) -> int:
    y, m, d, h, mi, s, f = dt
    if not (_valid_date(y, m, d) and _valid_time(h, mi, s, allow_leap_second) and 0 <= f < FRAC_PER_SECOND):
        raise InvalidDatetimeError(f"invalid datetime: {tuple(dt)}")
    return y * 10**10 + m * 10**8 + d * 10**6 + h * 10**4 + mi * 100 + s


def _split_seconds(t: int, frac: int, allow_leap_second: bool, original: int) -> CivilDateTime:
    date, hms = divmod(t, 10**6)
    y, md = divmod(date, 10_000)
    m, d = divmod(md, 100)
    h, ms = divmod(hms, 10_000)
    mi, s = divmod(ms, 100)
    if not (_valid_date(y, m, d) and _valid_time(h, mi, s, allow_leap_second)):
        raise InvalidEncodingError(f"not a valid datetime encoding: {original}")
    return CivilDateTime(y, m, d, h, mi, s, frac)


def datetime_to_ts64sec(dt: CivilDateTime) -> int:
    """Encode as ``YYYYMMDDhhmmss``; the fraction must be zero."""
    value = _compose_seconds(dt, False)
    if dt.frac_1e5:
        raise NonzeroFractionError(f"Ts64Sec cannot hold a fraction: {tuple(dt)}")
    return value


def ts64sec_to_datetime(t: int) -> CivilDateTime:
    _check_int(t)
    return _split_seconds(t, 0, False, t)


def datetime_to_ts64frac(dt: CivilDateTime, *, allow_leap_second: bool = False) -> int:
    """Encode as ``YYYYMMDDhhmmssXXXXX`` (``XXXXX`` in 10 us units).

    ``allow_leap_second`` exists for the timescale module; UTC ``23:59:60``
    is otherwise rejected.
    """
    return _compose_seconds(dt, allow_leap_second) * FRAC_PER_SECOND + dt.frac_1e5


def ts64frac_to_datetime(t: int, *, allow_leap_second: bool = False) -> CivilDateTime:
    _check_int(t)
    secs, frac = divmod(t, FRAC_PER_SECOND)
    return _split_seconds(secs, frac, allow_leap_second, t)


# -- PackedTs64 -------------------------------------------------------------


def _round_half_even(num: int, den: int) -> int:
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def frac_to_packed_units(frac_1e5: int) -> int:
    return _round_half_even(frac_1e5 * PACKED_FRAC_PER_SECOND, FRAC_PER_SECOND)


def packed_units_to_frac(units: int) -> int:
    return _round_half_even(units * FRAC_PER_SECOND, PACKED_FRAC_PER_SECOND)


def pack_ts64(dt: CivilDateTime, century_base: int = DEFAULT_CENTURY_BASE) -> int:
    """Pack into the binary bit-field layout.

    Bits 63..56 hold ``year - century_base``; then month, day, hour, minute
    and second one byte each; bits 15..0 hold the fraction in 1/65536 s,
    converted from 10 us units with round-half-to-even.
    """
    y, m, d, h, mi, s, f = dt
    if not (_valid_date(y, m, d) and _valid_time(h, mi, s, False) and 0 <= f < FRAC_PER_SECOND):
        raise InvalidDatetimeError(f"invalid datetime: {tuple(dt)}")
    yy = y - century_base
    if not 0 <= yy <= 99:
        raise YearOutOfCenturyError(f"year {y} outside [{century_base}, {century_base + 99}]")
    units = frac_to_packed_units(f)
    return (yy << 56) | (m << 48) | (d << 40) | (h << 32) | (mi << 24) | (s << 16) | units


def unpack_fields(p: int, century_base: int = DEFAULT_CENTURY_BASE) -> tuple[int, int, int, int, int, int, int]:
    """Raw ``(year, month, day, hour, minute, second, frac_units)`` of a packed value."""
    _check_int(p)
    if p >> 64:
        raise InvalidEncodingError(f"wider than 64 bits: {p}")
    yy = p >> 56
    m = (p >> 48) & 0xFF
    d = (p >> 40) & 0xFF
    h = (p >> 32) & 0xFF
    mi = (p >> 24) & 0xFF
    s = (p >> 16) & 0xFF
    units = p & 0xFFFF
    y = century_base + yy
    if yy > 99 or not (_valid_date(y, m, d) and _valid_time(h, mi, s, False)):
        raise InvalidEncodingError(f"not a valid packed timestamp: {p:#018x}")
    return y, m, d, h, mi, s, units


def unpack_ts64(p: int, century_base: int = DEFAULT_CENTURY_BASE) -> CivilDateTime:
    y, m, d, h, mi, s, units = unpack_fields(p, century_base)
    return CivilDateTime(y, m, d, h, mi, s, packed_units_to_frac(units))


# -- arithmetic on encodings --------------------------------------------------


def truncate(t: int, unit: str, fmt: Format = Format.TS64SEC) -> int:
    """Lower bound of the ``unit`` bin containing ``t``.

    Integer division then multiplication by the unit's place value.  The one
    exception is month truncation of a Ts32, which returns the six-digit
    ``YYYYMM`` label.
    """
    fmt = Format.parse(fmt)
    if unit not in UNITS:
        raise ValueError(f"unknown unit {unit!r}")
    places = _PLACE[fmt]
    if unit not in places:
        raise UnitFinerThanFormatError(f"{unit} is finer than {fmt.value}")
    if fmt is Format.TS32 and unit == "month":
        return t // 100
    place = places[unit]
    return t // place * place


def split_date_time(t: int) -> tuple[int, int]:
    """Split a Ts64Sec into ``(YYYYMMDD, hhmmss)``."""
    ts64sec_to_datetime(t)
    return divmod(t, 10**6)


def day_key(t: int, fmt: Format) -> int:
    """The Ts32 day containing ``t``."""
    if fmt is Format.TS64SEC:
        return t // 10**6
    if fmt is Format.TS64FRAC:
        return t // 10**11
    return t


# -- dispatch -------------------------------------------------------------------


def encode(dt: CivilDateTime, fmt: Format) -> int:
    if fmt is Format.TS64SEC:
        return datetime_to_ts64sec(dt)
    if fmt is Format.TS64FRAC:
        return datetime_to_ts64frac(dt)
    if dt[3:] != (0, 0, 0, 0):
        raise InvalidDatetimeError("Ts32 holds dates only")
    return date_to_int(dt[:3])


def decode(t: int, fmt: Format) -> CivilDateTime:
    if fmt is Format.TS64SEC:
        return ts64sec_to_datetime(t)
    if fmt is Format.TS64FRAC:
        return ts64frac_to_datetime(t)
    return CivilDateTime(*int_to_date(t))


def is_valid(t: int, fmt: Format) -> bool:
    try:
        decode(t, fmt)
    except InvalidEncodingError:
        return False
    return True
