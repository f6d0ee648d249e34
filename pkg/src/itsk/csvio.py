"""CSV record files.

Integer form: header ``ts,value``, one ``<int>,<float>`` per line.
Baseline form: header ``iso_ts,value``.  UTF-8, LF line endings on write;
CRLF accepted on read.  Floats are written with ``repr`` so they round-trip.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO

from .errors import CsvParseError
from .ingest import Record
from .workloads import BaselineRecord

RECORD_HEADER = "ts,value"
BASELINE_HEADER = "iso_ts,value"


def write_records(records: Iterable[tuple[int, float]], fh: TextIO) -> int:
    fh.write(RECORD_HEADER + "\n")
    n = 0
    for ts, value in records:
        fh.write(f"{ts},{float(value)!r}\n")
        n += 1
    return n


def write_baseline(records: Iterable[BaselineRecord], fh: TextIO) -> int:
    fh.write(BASELINE_HEADER + "\n")
    n = 0
    for text, value in records:
        fh.write(f"{text},{float(value)!r}\n")
        n += 1
    return n


def read_records(fh: TextIO) -> Iterator[Record]:
    """Yield records; malformed lines raise :class:`CsvParseError` with the line number."""
    header = fh.readline().rstrip("\r\n")
    if header != RECORD_HEADER:
        raise CsvParseError(f"expected header {RECORD_HEADER!r}, got {header!r}", 1)
    for lineno, line in enumerate(fh, start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CsvParseError(f"expected 2 fields, got {len(parts)}", lineno)
        ts_s, value_s = parts
        if not ts_s.isdigit():
            raise CsvParseError(f"timestamp is not a non-negative integer: {ts_s!r}", lineno)
        try:
            value = float(value_s)
        except ValueError:
            raise CsvParseError(f"value is not a number: {value_s!r}", lineno) from None
        yield Record(int(ts_s), value)
