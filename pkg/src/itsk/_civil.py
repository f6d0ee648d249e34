"""Civil carry arithmetic on decimal encodings (second shifts, next day).

Kept out of :mod:`itsk.codec` on purpose: the codec only encodes, decodes
and truncates.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta

from .codec import FRAC_PER_SECOND
from .errors import InvalidEncodingError


def shift_seconds(t: int, seconds: int) -> int:
    """Add whole ``seconds`` to a valid Ts64Frac, carrying through to the year."""
    secs, frac = divmod(t, FRAC_PER_SECOND)
    day, hms = divmod(secs, 10**6)
    h, ms = divmod(hms, 10_000)
    mi, s = divmod(ms, 100)
    y, md = divmod(day, 10_000)
    m, d = divmod(md, 100)
    try:
        dt = datetime(y, m, d, h, mi, s) + timedelta(seconds=seconds)
    except (ValueError, OverflowError) as exc:
        raise InvalidEncodingError(f"{t} shifted by {seconds}s leaves the supported range") from exc
    return (
        dt.year * 10**10 + dt.month * 10**8 + dt.day * 10**6 + dt.hour * 10**4 + dt.minute * 100 + dt.second
    ) * FRAC_PER_SECOND + frac


def next_day(ts32: int) -> int:
    y, md = divmod(ts32, 10_000)
    m, d = divmod(md, 100)
    nd = date(y, m, d) + timedelta(days=1)
    return nd.year * 10_000 + nd.month * 100 + nd.day


def previous_day(ts32: int) -> int:
    y, md = divmod(ts32, 10_000)
    m, d = divmod(md, 100)
    pd = date(y, m, d) - timedelta(days=1)
    return pd.year * 10_000 + pd.month * 100 + pd.day

