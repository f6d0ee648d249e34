"""Batched write path: buffer, optionally sort, then write a batch at a time.

A :class:`BatchBuffer` is single-owner.  It may move between threads but
must not be used from two at once; several buffers may share one store.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Protocol

from . import codec
from .codec import Format
from .errors import FormatMismatchError, InvalidTimestampError, ItskError, StoreWriteError

__all__ = ["Record", "FlushReport", "BatchBuffer", "ingest_stream", "DEFAULT_BATCH_SIZE", "MAX_BATCH_SIZE"]

DEFAULT_BATCH_SIZE = 1_000
MAX_BATCH_SIZE = 50_000


class Record(NamedTuple):
    ts: int
    value: float


class BatchSink(Protocol):
    def write_batch(self, batch: list[Record]) -> list: ...


@dataclass
class FlushReport:
    records_flushed: int = 0
    batches: int = 0
    segments_created: int = 0
    wall_time: float = 0.0
    # time spent inside flushes only; equals wall_time for a single flush
    flush_time: float = 0.0

    def __add__(self, other: "FlushReport") -> "FlushReport":
        return FlushReport(
            self.records_flushed + other.records_flushed,
            self.batches + other.batches,
            self.segments_created + other.segments_created,
            self.wall_time + other.wall_time,
            self.flush_time + other.flush_time,
        )

    @property
    def batch_latency(self) -> float:
        """Mean seconds per flushed batch."""
        return self.flush_time / self.batches if self.batches else 0.0

    @property
    def throughput(self) -> float:
        return self.records_flushed / self.wall_time if self.wall_time > 0 else float("inf")


_OTHER = {Format.TS64SEC: Format.TS64FRAC, Format.TS64FRAC: Format.TS64SEC}


class BatchBuffer:
    def __init__(
        self,
        destination: BatchSink,
        capacity: int = DEFAULT_BATCH_SIZE,
        fmt: Format | str = Format.TS64SEC,
        sort_on_flush: bool = True,
    ):
        if not 1 <= capacity <= MAX_BATCH_SIZE:
            raise ValueError(f"capacity must be in 1..{MAX_BATCH_SIZE}, got {capacity}")
        self.destination = destination
        self.capacity = capacity
        self.format = Format.parse(fmt)
        if self.format not in _OTHER:
            raise ValueError("records carry Ts64Sec or Ts64Frac timestamps")
        self.sort_on_flush = sort_on_flush
        self.pending: list[Record] = []

    def __len__(self) -> int:
        return len(self.pending)

    def _check(self, ts: int) -> None:
        if codec.is_valid(ts, self.format):
            return
        if codec.is_valid(ts, _OTHER[self.format]):
            raise FormatMismatchError(f"{ts} is a {_OTHER[self.format].value} timestamp, buffer expects {self.format.value}")
        raise InvalidTimestampError(f"{ts} is not a valid {self.format.value} timestamp")

    def append(self, record: Record | tuple[int, float]) -> FlushReport | None:
        """Stage one record; returns the flush report when the batch fills up."""
        ts, value = record
        self._check(ts)
        self.pending.append(Record(ts, float(value)))
        if len(self.pending) >= self.capacity:
            return self.flush()
        return None

    def flush(self) -> FlushReport:
        """Write everything pending as one batch.

        On a store failure the pending records stay put so the caller can
        retry; nothing is deduplicated downstream.
        """
        if not self.pending:
            return FlushReport()
        start = time.perf_counter()
        batch = self.pending
        if self.sort_on_flush:
            batch = sorted(batch, key=lambda r: r.ts)  # stable
        try:
            created = self.destination.write_batch(batch)
        except Exception as exc:
            raise StoreWriteError(f"flush of {len(batch)} records failed: {exc}") from exc
        self.pending = []
        elapsed = time.perf_counter() - start
        return FlushReport(len(batch), 1, len(created or ()), elapsed, elapsed)


def ingest_stream(
    records: Iterable[Record | tuple[int, float]],
    store: BatchSink,
    capacity: int = DEFAULT_BATCH_SIZE,
    sort: bool = True,
    fmt: Format | str = Format.TS64SEC,
) -> FlushReport:
    """Push ``records`` through a fresh buffer and flush the remainder.

    ``wall_time`` in the returned report covers the whole run, not only the
    flushes.
    """
    buf = BatchBuffer(store, capacity, fmt, sort)
    total = FlushReport()
    start = time.perf_counter()
    for position, rec in enumerate(records):
        try:
            report = buf.append(rec)
        except ItskError as exc:
            raise type(exc)(f"record {position}: {exc}") from exc
        if report is not None:
            total = total + report
    try:
        total = total + buf.flush()
    except ItskError as exc:
        raise type(exc)(f"final flush: {exc}") from exc
    total.wall_time = time.perf_counter() - start
    return total
