"""Ingest / query / storage benchmark: integer arm vs ISO-text baseline arm.

Every number in a :class:`BenchRow` is measured in the same run.  Timings
are the median of ``repeats`` runs after ``warmup`` discarded runs.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from .ingest import Record, ingest_stream
from .store import Table
from .workloads import BaselineRecord, BaselineTable, int_to_iso, scenario_records, to_baseline

__all__ = ["BENCH_COLUMNS", "BenchRow", "run_bench", "measure_ingest", "time_median", "pick_range"]

ARMS = ("integer", "baseline")

# CSV column order; append-only
BENCH_COLUMNS = (
    "scenario",
    "arm",
    "batch_size",
    "records",
    "repeats",
    "wall_time_s",
    "throughput_rps",
    "batch_latency_ms",
    "query_ms",
    "query_rows",
    "ts_bytes",
    "bytes_stored",
    "throughput_vs_batch1_pct",
    "bytes_vs_baseline_pct",
)


@dataclass
class BenchRow:
    scenario: str
    arm: str
    batch_size: int
    records: int
    repeats: int
    wall_time_s: float
    throughput_rps: float
    batch_latency_ms: float
    query_ms: float
    query_rows: int
    ts_bytes: int
    bytes_stored: int
    throughput_vs_batch1_pct: float | None = None
    bytes_vs_baseline_pct: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def time_median(fn: Callable[[], object], warmup: int = 3, repeats: int = 5) -> float:
    """Median wall seconds of ``fn()`` over ``repeats`` runs after ``warmup`` runs."""
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def _ingest_baseline(rows: Sequence[BaselineRecord], table: BaselineTable, capacity: int, sort: bool = True) -> int:
    """Same buffering discipline as :class:`itsk.ingest.BatchBuffer`, for text rows."""
    pending: list[BaselineRecord] = []
    batches = 0
    for r in rows:
        pending.append(r)
        if len(pending) >= capacity:
            table.write_batch(sorted(pending, key=lambda x: x.ts_text) if sort else pending)
            pending = []
            batches += 1
    if pending:
        table.write_batch(sorted(pending, key=lambda x: x.ts_text) if sort else pending)
        batches += 1
    return batches


@dataclass
class IngestMeasurement:
    wall_time: float
    batch_latency: float
    table: object


def measure_ingest(
    arm: str,
    records: Sequence[Record] | Sequence[BaselineRecord],
    batch_size: int,
    warmup: int = 3,
    repeats: int = 5,
) -> IngestMeasurement:
    """Median ingest time of ``records`` into a fresh in-memory store per run."""
    walls, latencies = [], []
    table = None
    for i in range(warmup + repeats):
        if arm == "integer":
            table = Table()
            start = time.perf_counter()
            report = ingest_stream(records, table, capacity=batch_size)
            wall = time.perf_counter() - start
            latency = report.batch_latency
        elif arm == "baseline":
            table = BaselineTable()
            start = time.perf_counter()
            batches = _ingest_baseline(records, table, batch_size)
            wall = time.perf_counter() - start
            latency = wall / batches
        else:
            raise ValueError(f"unknown arm {arm!r}")
        if i >= warmup:
            walls.append(wall)
            latencies.append(latency)
    return IngestMeasurement(statistics.median(walls), statistics.median(latencies), table)


def pick_range(timestamps: Sequence[int], selectivity: float = 0.03, position: float = 0.5) -> tuple[int, int]:
    """Inclusive ``(lo, hi)`` covering about ``selectivity`` of the sorted ``timestamps``."""
    ts = sorted(timestamps)
    span = max(1, int(len(ts) * selectivity))
    i = min(int(len(ts) * position), len(ts) - span)
    return ts[i], ts[i + span - 1]


def run_bench(
    scenario: str,
    records: int = 100_000,
    batch_sizes: Sequence[int] = (1, 100, 1000, 10000),
    arms: Sequence[str] = ARMS,
    warmup: int = 3,
    repeats: int = 5,
    seed: int = 0,
) -> list[BenchRow]:
    for arm in arms:
        if arm not in ARMS:
            raise ValueError(f"unknown arm {arm!r}")
    data = scenario_records(scenario, records, seed)
    baseline_data = list(to_baseline(data))
    lo, hi = pick_range([r.ts for r in data])
    lo_text, hi_text = int_to_iso(lo), int_to_iso(hi)

    rows: list[BenchRow] = []
    for arm in arms:
        for bs in batch_sizes:
            m = measure_ingest(arm, data if arm == "integer" else baseline_data, bs, warmup, repeats)
            if arm == "integer":
                table: Table = m.table
                query_ms = 1e3 * time_median(lambda: table.range_query(lo, hi), warmup, repeats)
                query_rows = len(table.range_query(lo, hi))
                st = table.stats()
                ts_bytes = st.ts_bytes
                stored = st.ts_bytes + st.value_bytes + st.index_bytes
            else:
                btable: BaselineTable = m.table
                query_ms = 1e3 * time_median(lambda: btable.range_scan(lo_text, hi_text), warmup, repeats)
                query_rows = len(btable.range_scan(lo_text, hi_text))
                ts_bytes = btable.ts_bytes
                stored = btable.nbytes
            rows.append(
                BenchRow(
                    scenario=scenario,
                    arm=arm,
                    batch_size=bs,
                    records=records,
                    repeats=repeats,
                    wall_time_s=m.wall_time,
                    throughput_rps=records / m.wall_time,
                    batch_latency_ms=1e3 * m.batch_latency,
                    query_ms=query_ms,
                    query_rows=query_rows,
                    ts_bytes=ts_bytes,
                    bytes_stored=stored,
                )
            )
    _derive(rows)
    return rows


def _derive(rows: list[BenchRow]) -> None:
    """Fill the relative columns from the measured ones."""
    batch1 = {r.arm: r.throughput_rps for r in rows if r.batch_size == 1}
    baseline_bytes = {r.batch_size: r.bytes_stored for r in rows if r.arm == "baseline"}
    for r in rows:
        if r.arm in batch1:
            r.throughput_vs_batch1_pct = 100.0 * (r.throughput_rps / batch1[r.arm] - 1.0)
        if r.batch_size in baseline_bytes:
            r.bytes_vs_baseline_pct = 100.0 * (r.bytes_stored / baseline_bytes[r.batch_size] - 1.0)
