"""Day-partitioned columnar store for ``(integer timestamp, float)`` rows.

A :class:`Table` maps a Ts32 day key to a partition holding immutable,
sorted :class:`Segment` objects.  Each segment keeps its timestamps as a
:class:`~itsk.compression.CompressedColumn` plus a per-128-row min/max index,
so a range query skips whole partitions by day key and whole blocks by their
index entry before decoding anything.

On disk a table is a directory with a ``table.json`` and one subdirectory per
partition named by its day key; each segment is one ``.seg`` file::

    "ITSK" | version u16 | format tag u8 | row_count u64
    | block index (ceil(row_count/128) x (min u64, max u64))
    | CompressedColumn | values (row_count x f64)

all little-endian.
"""

from __future__ import annotations

import json
import os
import shutil
import struct
import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import codec
from .codec import Format
from .compression import BLOCK_SIZE, CompressedColumn, compress_column, decompress_column
from .errors import (
    CorruptBlockError,
    CorruptSegmentError,
    FormatMismatchError,
    InvalidDateError,
    InvalidEncodingError,
    InvalidRangeError,
    UnsortedBatchError,
)

__all__ = ["Segment", "Table", "ScanStats", "BinAggregate", "PartitionStats", "StorageReport"]

SEGMENT_MAGIC = b"ITSK"
SEGMENT_VERSION = 1
_SEGMENT_HEADER = struct.Struct("<4sHBQ")
_FORMAT_TAGS = {Format.TS64SEC: 1, Format.TS64FRAC: 2}
_TAG_FORMATS = {v: k for k, v in _FORMAT_TAGS.items()}


@dataclass(frozen=True)
class Segment:
    ts_column: CompressedColumn
    values: np.ndarray
    block_index: tuple[tuple[int, int], ...]
    row_count: int
    _block_max: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_block_max", tuple(mx for _, mx in self.block_index))

    @classmethod
    def build(cls, ts: Sequence[int], values: Sequence[float]) -> "Segment":
        """Build from timestamps already sorted ascending."""
        ts = list(ts)
        index = tuple((ts[i], ts[min(i + BLOCK_SIZE, len(ts)) - 1]) for i in range(0, len(ts), BLOCK_SIZE))
        return cls(compress_column(ts), np.asarray(values, dtype=np.float64), index, len(ts))

    def timestamps(self) -> list[int]:
        return decompress_column(self.ts_column)

    def validate(self) -> None:
        ts = self.timestamps()
        if not (len(ts) == self.row_count == len(self.values) == self.ts_column.total_count):
            raise CorruptSegmentError("row counts disagree")
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise CorruptSegmentError("timestamps not sorted")
        expected = tuple((min(c), max(c)) for c in (ts[i : i + BLOCK_SIZE] for i in range(0, len(ts), BLOCK_SIZE)))
        if expected != self.block_index:
            raise CorruptSegmentError("block index inconsistent with data")

    @property
    def ts_bytes(self) -> int:
        return self.ts_column.nbytes

    @property
    def value_bytes(self) -> int:
        return 8 * self.row_count

    @property
    def index_bytes(self) -> int:
        return 16 * len(self.block_index)

    def to_bytes(self, fmt: Format) -> bytes:
        parts = [_SEGMENT_HEADER.pack(SEGMENT_MAGIC, SEGMENT_VERSION, _FORMAT_TAGS[fmt], self.row_count)]
        parts.append(struct.pack(f"<{2 * len(self.block_index)}Q", *(v for pair in self.block_index for v in pair)))
        parts.append(self.ts_column.to_bytes())
        parts.append(self.values.astype("<f8").tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple[Format, "Segment"]:
        if len(data) < _SEGMENT_HEADER.size:
            raise CorruptSegmentError("truncated segment header")
        magic, version, tag, rows = _SEGMENT_HEADER.unpack_from(data)
        if magic != SEGMENT_MAGIC or version != SEGMENT_VERSION or tag not in _TAG_FORMATS:
            raise CorruptSegmentError(f"bad segment header {magic!r} v{version} tag {tag}")
        pos = _SEGMENT_HEADER.size
        nblocks = -(-rows // BLOCK_SIZE)
        try:
            flat = struct.unpack_from(f"<{2 * nblocks}Q", data, pos)
            pos += 16 * nblocks
            column, pos = CompressedColumn.read_from(data, pos)
        except (struct.error, CorruptBlockError) as exc:
            raise CorruptSegmentError(f"bad segment body: {exc}") from exc
        if len(data) - pos != 8 * rows:
            raise CorruptSegmentError("value column size mismatch")
        values = np.frombuffer(data, dtype="<f8", count=rows, offset=pos).astype(np.float64)
        index = tuple(zip(flat[0::2], flat[1::2]))
        seg = cls(column, values, index, rows)
        if column.total_count != rows:
            raise CorruptSegmentError("column row count mismatch")
        return _TAG_FORMATS[tag], seg


@dataclass
class ScanStats:
    """Counters filled in by a query; used to check pruning."""

    partitions_opened: int = 0
    segments_scanned: int = 0
    blocks_decompressed: int = 0
    blocks_skipped: int = 0
    rows_returned: int = 0


@dataclass(frozen=True)
class BinAggregate:
    bin_label: int
    count: int
    sum: float
    min: float
    max: float

    @property
    def mean(self) -> float:
        return self.sum / self.count


@dataclass(frozen=True)
class PartitionStats:
    key: int
    segments: int
    rows: int
    ts_bytes: int
    value_bytes: int
    index_bytes: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(8 * self.rows, self.ts_bytes) if self.ts_bytes else Fraction(0)


@dataclass(frozen=True)
class StorageReport:
    partitions: tuple[PartitionStats, ...]

    @property
    def rows(self) -> int:
        return sum(p.rows for p in self.partitions)

    @property
    def ts_bytes(self) -> int:
        return sum(p.ts_bytes for p in self.partitions)

    @property
    def value_bytes(self) -> int:
        return sum(p.value_bytes for p in self.partitions)

    @property
    def index_bytes(self) -> int:
        return sum(p.index_bytes for p in self.partitions)

    @property
    def ratio(self) -> Fraction:
        return Fraction(8 * self.rows, self.ts_bytes) if self.ts_bytes else Fraction(0)


class Table:
    """Partitioned table of one timestamp format.

    Writes (``write_batch``, ``drop_partitions_before``) are serialized by a
    lock.  Readers copy the segment lists they need under the same lock and
    then work on that snapshot, so they see the segments visible when the
    call started.
    """

    def __init__(self, fmt: Format | str = Format.TS64SEC, directory: str | os.PathLike | None = None):
        fmt = Format.parse(fmt)
        if fmt not in _FORMAT_TAGS:
            raise ValueError(f"tables hold Ts64Sec or Ts64Frac, not {fmt.value}")
        self.format = fmt
        self.directory = Path(directory) if directory is not None else None
        self._partitions: dict[int, list[Segment]] = {}
        self._keys: list[int] = []
        self._lock = threading.Lock()
        self._next_id = 0
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            meta = self.directory / "table.json"
            if not meta.exists():
                meta.write_text(json.dumps({"format": fmt.value, "version": SEGMENT_VERSION}) + "\n")

    # -- persistence ------------------------------------------------------

    @classmethod
    def open(cls, directory: str | os.PathLike) -> "Table":
        directory = Path(directory)
        meta = directory / "table.json"
        if not meta.exists():
            raise FileNotFoundError(f"no table at {directory}")
        fmt = Format(json.loads(meta.read_text())["format"])
        table = cls(fmt, directory)
        for part in sorted(p for p in directory.iterdir() if p.is_dir() and p.name.isdigit()):
            key = int(part.name)
            segments = []
            for seg_path in sorted(part.glob("*.seg")):
                seg_fmt, seg = Segment.from_bytes(seg_path.read_bytes())
                if seg_fmt is not fmt:
                    raise CorruptSegmentError(f"{seg_path}: format {seg_fmt.value}, table is {fmt.value}")
                segments.append(seg)
                table._next_id = max(table._next_id, int(seg_path.stem) + 1)
            if segments:
                table._partitions[key] = segments
        table._keys = sorted(table._partitions)
        return table

    def _persist(self, key: int, seg_id: int, seg: Segment) -> None:
        part_dir = self.directory / str(key)
        part_dir.mkdir(exist_ok=True)
        final = part_dir / f"{seg_id:08d}.seg"
        tmp = final.with_suffix(".tmp")
        tmp.write_bytes(seg.to_bytes(self.format))
        os.replace(tmp, final)

    # -- writes -----------------------------------------------------------

    def _day(self, t: int) -> int:
        return codec.day_key(t, self.format)

    def write_batch(self, batch: Sequence[tuple[int, float]]) -> list[tuple[int, int]]:
        """Store a ts-sorted batch as one new segment per touched day.

        Returns ``(partition key, segment id)`` for each created segment.
        """
        if not batch:
            return []
        fmt = self.format
        prev = -1
        for t, _ in batch:
            if not codec.is_valid(t, fmt):
                raise FormatMismatchError(f"{t} is not a valid {fmt.value} timestamp")
            if t < prev:
                raise UnsortedBatchError(f"batch not sorted at {t} (after {prev})")
            prev = t
        day = self._day
        built = []
        for key, rows in groupby(batch, key=lambda r: day(r[0])):
            rows = list(rows)
            built.append((key, Segment.build([r[0] for r in rows], [r[1] for r in rows])))
        ids = []
        with self._lock:
            for key, seg in built:
                seg_id = self._next_id
                self._next_id += 1
                if self.directory is not None:
                    self._persist(key, seg_id, seg)
                if key not in self._partitions:
                    self._partitions[key] = []
                    self._keys.insert(bisect_left(self._keys, key), key)
                self._partitions[key].append(seg)
                ids.append((key, seg_id))
        return ids

    def drop_partitions_before(self, cutoff_day: int) -> int:
        """Remove every partition whose key is strictly less than ``cutoff_day``."""
        try:
            codec.int_to_date(cutoff_day)
        except InvalidEncodingError as exc:
            raise InvalidDateError(f"invalid cutoff day {cutoff_day}") from exc
        with self._lock:
            n = bisect_left(self._keys, cutoff_day)
            doomed = self._keys[:n]
            self._partitions = {k: v for k, v in self._partitions.items() if k >= cutoff_day}
            self._keys = self._keys[n:]
            if self.directory is not None:
                for key in doomed:
                    shutil.rmtree(self.directory / str(key), ignore_errors=True)
        return len(doomed)

    # -- reads ------------------------------------------------------------

    def partition_keys(self) -> list[int]:
        with self._lock:
            return list(self._keys)

    def _snapshot(self, lo_day: int, hi_day: int) -> list[tuple[int, list[Segment]]]:
        with self._lock:
            keys = self._keys[bisect_left(self._keys, lo_day) : bisect_right(self._keys, hi_day)]
            return [(k, list(self._partitions[k])) for k in keys]

    def range_query(self, lo: int, hi: int, stats: ScanStats | None = None) -> list[tuple[int, float]]:
        """Rows with ``lo <= ts <= hi`` (inclusive, like SQL ``BETWEEN``).

        Ordered by partition day, then segment write order, then row order.
        """
        if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 0 or lo > hi:
            raise InvalidRangeError(f"invalid range [{lo}, {hi}]")
        if stats is None:
            stats = ScanStats()
        out: list[tuple[int, float]] = []
        for _key, segments in self._snapshot(self._day(lo), self._day(hi)):
            stats.partitions_opened += 1
            for seg in segments:
                stats.segments_scanned += 1
                nblocks = len(seg.block_index)
                k = bisect_left(seg._block_max, lo)
                stats.blocks_skipped += k
                while k < nblocks:
                    bmin, bmax = seg.block_index[k]
                    if bmin > hi:
                        stats.blocks_skipped += nblocks - k
                        break
                    ts = seg.ts_column.decode_block(k, bmin)
                    stats.blocks_decompressed += 1
                    start = k * BLOCK_SIZE
                    vals = seg.values[start : start + len(ts)].tolist()
                    if lo <= bmin and bmax <= hi:
                        out.extend(zip(ts, vals))
                    else:
                        out.extend((t, v) for t, v in zip(ts, vals) if lo <= t <= hi)
                    k += 1
        stats.rows_returned += len(out)
        return out

    def aggregate_bins(self, lo: int, hi: int, unit: str, stats: ScanStats | None = None) -> list[BinAggregate]:
        """Group rows in ``[lo, hi]`` by ``codec.truncate(ts, unit)``; ascending labels."""
        codec.truncate(lo, unit, self.format)  # rejects units finer than the format
        acc: dict[int, list] = {}
        fmt = self.format
        trunc = codec.truncate
        for t, v in self.range_query(lo, hi, stats):
            label = trunc(t, unit, fmt)
            a = acc.get(label)
            if a is None:
                acc[label] = [1, v, v, v]
            else:
                a[0] += 1
                a[1] += v
                if v < a[2]:
                    a[2] = v
                if v > a[3]:
                    a[3] = v
        return [BinAggregate(label, *acc[label]) for label in sorted(acc)]

    def rows(self) -> list[tuple[int, float]]:
        out = []
        for _key, segments in self._snapshot(0, 1 << 64):
            for seg in segments:
                out.extend(zip(seg.timestamps(), seg.values.tolist()))
        return out

    def stats(self) -> StorageReport:
        parts = []
        for key, segments in self._snapshot(0, 1 << 64):
            parts.append(
                PartitionStats(
                    key=key,
                    segments=len(segments),
                    rows=sum(s.row_count for s in segments),
                    ts_bytes=sum(s.ts_bytes for s in segments),
                    value_bytes=sum(s.value_bytes for s in segments),
                    index_bytes=sum(s.index_bytes for s in segments),
                )
            )
        return StorageReport(tuple(parts))

    def segments(self, key: int) -> list[Segment]:
        with self._lock:
            return list(self._partitions.get(key, ()))

    def __len__(self) -> int:
        return self.stats().rows


def table_from_rows(rows: Iterable[tuple[int, float]], fmt: Format | str = Format.TS64SEC) -> Table:
    """In-memory table holding ``rows`` (sorted first) in a single batch."""
    table = Table(fmt)
    table.write_batch(sorted(rows, key=lambda r: r[0]))
    return table
