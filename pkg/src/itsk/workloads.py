"""Deterministic synthetic workloads and the ISO-text baseline.

Three generators, all driven by numpy's PCG64 bit generator
(``numpy.random.Generator(numpy.random.PCG64(seed))``):

``hft``
    One trade source.  Exponential inter-arrivals with mean ``1/rate``;
    each gap has a 20% chance of being shrunk twentyfold (a burst).  Values
    are a price random walk from 100.0.
``cdr``
    Call detail records.  Poisson arrivals with piecewise-constant intensity
    ``rate * CDR_HOURLY_MULTIPLIERS[hour of day]``.  Values are lognormal call
    durations in seconds.
``iot``
    ``devices`` sensors, each reporting every ``cadence_s`` seconds starting
    at ``start``.  Readings are interleaved by time, device order breaking
    ties.  Values are per-device temperature random walks.

Time is generated in 10 us ticks from ``start`` and encoded in the requested
format (Ts64Sec drops the fraction).  Every generator yields records in
non-decreasing timestamp order.

The baseline is the same data with timestamps rendered as fixed-width
``YYYY-MM-DDThh:mm:ss`` text and compared as strings.
"""

from __future__ import annotations

import re
from itertools import islice
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import codec
from .codec import CivilDateTime, Format
from .errors import InvalidDatetimeError, InvalidEncodingError, InvalidSpecError, MalformedBoundError, UnsortedBatchError
from .ingest import Record

__all__ = [
    "KINDS",
    "CDR_HOURLY_MULTIPLIERS",
    "WorkloadSpec",
    "BaselineRecord",
    "BaselineTable",
    "generate",
    "to_baseline",
    "iso_to_int",
    "int_to_iso",
    "baseline_range_scan",
    "scenario_spec",
    "scenario_records",
]

KINDS = ("hft", "cdr", "iot")

TICKS_PER_SECOND = codec.FRAC_PER_SECOND

# relative call intensity per hour of day, 00h..23h
CDR_HOURLY_MULTIPLIERS = (
    0.15, 0.10, 0.08, 0.07, 0.08, 0.15, 0.40, 0.90,
    1.40, 1.60, 1.60, 1.50, 1.40, 1.50, 1.60, 1.60,
    1.50, 1.40, 1.30, 1.20, 1.10, 0.90, 0.60, 0.30,
)  # fmt: skip

ISO_LENGTH = 19


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    start: CivilDateTime = CivilDateTime(2023, 1, 1)
    duration_s: float = 60.0
    rate: float = 10.0
    devices: int = 1
    cadence_s: float = 5.0
    seed: int = 0
    fmt: Format = Format.TS64SEC

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown workload kind {self.kind!r}")
        if not self.duration_s > 0:
            raise InvalidSpecError("duration must be positive")
        if self.kind == "iot":
            if self.devices < 1 or not round(self.cadence_s * TICKS_PER_SECOND) >= 1:
                raise InvalidSpecError("iot needs devices >= 1 and a cadence of at least 10 us")
        elif not self.rate > 0:
            raise InvalidSpecError("rate must be positive")
        if Format.parse(self.fmt) not in (Format.TS64SEC, Format.TS64FRAC):
            raise InvalidSpecError("workloads emit Ts64Sec or Ts64Frac")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must fit in 64 bits")
        try:
            codec.datetime_to_ts64frac(self.start)
            self.end_datetime()
        except (InvalidEncodingError, InvalidDatetimeError, OverflowError) as exc:
            raise InvalidSpecError(f"bad start/duration: {exc}") from exc

    @property
    def duration_ticks(self) -> int:
        return round(self.duration_s * TICKS_PER_SECOND)

    def start_datetime(self) -> datetime:
        y, m, d, h, mi, s, f = self.start
        return datetime(y, m, d, h, mi, s, f * 10)

    def end_datetime(self) -> datetime:
        return self.start_datetime() + timedelta(seconds=self.duration_s)


class _Encoder:
    """Tick offset -> integer timestamp, caching the current second."""

    def __init__(self, spec: WorkloadSpec):
        self.origin = spec.start_datetime().replace(microsecond=0)
        self.origin_ticks = spec.start.frac_1e5
        self.frac = Format.parse(spec.fmt) is Format.TS64FRAC
        self._sec = -1
        self._sec_value = 0

    def __call__(self, ticks: int) -> int:
        sec, frac = divmod(ticks + self.origin_ticks, TICKS_PER_SECOND)
        if sec != self._sec:
            dt = self.origin + timedelta(seconds=sec)
            self._sec = sec
            self._sec_value = (
                dt.year * 10**10 + dt.month * 10**8 + dt.day * 10**6 + dt.hour * 10**4 + dt.minute * 100 + dt.second
            )
        if self.frac:
            return self._sec_value * TICKS_PER_SECOND + frac
        return self._sec_value


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _hft_ticks(spec: WorkloadSpec, rng: np.random.Generator) -> Iterator[tuple[int, float]]:
    end = spec.duration_ticks
    mean_gap = TICKS_PER_SECOND / spec.rate
    chunk = max(64, min(1 << 16, int(spec.rate * spec.duration_s * 1.2) + 1))
    t = 0.0
    price = 100.0
    while True:
        gaps = rng.exponential(mean_gap, chunk)
        burst = rng.random(chunk) < 0.2
        gaps[burst] /= 20.0
        steps = rng.normal(0.0, 0.01, chunk)
        for gap, step in zip(gaps.tolist(), steps.tolist()):
            tick = int(t)
            if tick >= end:
                return
            price += step
            yield tick, round(price, 4)
            t += gap


def _cdr_ticks(spec: WorkloadSpec, rng: np.random.Generator) -> Iterator[tuple[int, float]]:
    end = spec.duration_ticks
    origin = spec.start_datetime()
    seg_start = 0
    while seg_start < end:
        here = origin + timedelta(microseconds=seg_start * 10)
        to_next_hour = ((59 - here.minute) * 60 + (59 - here.second)) * TICKS_PER_SECOND + (
            TICKS_PER_SECOND - here.microsecond // 10
        )
        seg_end = min(end, seg_start + to_next_hour)
        seconds = (seg_end - seg_start) / TICKS_PER_SECOND
        lam = spec.rate * CDR_HOURLY_MULTIPLIERS[here.hour] * seconds
        n = int(rng.poisson(lam))
        offsets = np.sort(rng.integers(seg_start, seg_end, n))
        durations = rng.lognormal(4.5, 1.0, n)
        for tick, dur in zip(offsets.tolist(), durations.tolist()):
            yield tick, round(dur, 1)
        seg_start = seg_end


def _iot_ticks(spec: WorkloadSpec, rng: np.random.Generator) -> Iterator[tuple[int, float]]:
    end = spec.duration_ticks
    cadence = round(spec.cadence_s * TICKS_PER_SECOND)
    temps = [20.0 + d for d in range(spec.devices)]
    tick = 0
    while tick < end:
        noise = rng.normal(0.0, 0.05, spec.devices).tolist()
        for d in range(spec.devices):
            temps[d] += noise[d]
            yield tick, round(temps[d], 3)
        tick += cadence


_GENERATORS = {"hft": _hft_ticks, "cdr": _cdr_ticks, "iot": _iot_ticks}


def generate(spec: WorkloadSpec) -> Iterator[Record]:
    """Records of ``spec`` in integer form, sorted by timestamp; a pure function of ``spec``."""
    spec.validate()
    encode = _Encoder(spec)
    ticks = _GENERATORS[spec.kind](spec, _rng(spec.seed))
    return (Record(encode(tick), value) for tick, value in ticks)


# -- baseline -----------------------------------------------------------------


class BaselineRecord(NamedTuple):
    ts_text: str
    value: float


_ISO_RE = re.compile(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}")


def int_to_iso(t: int) -> str:
    s = f"{t:014d}"
    return f"{s[0:4]}-{s[4:6]}-{s[6:8]}T{s[8:10]}:{s[10:12]}:{s[12:14]}"


def iso_to_int(text: str) -> int:
    """Parse ``YYYY-MM-DDThh:mm:ss`` into a Ts64Sec."""
    if not isinstance(text, str) or len(text) != ISO_LENGTH or not _ISO_RE.fullmatch(text):
        raise MalformedBoundError(f"not YYYY-MM-DDThh:mm:ss: {text!r}")
    t = int(text[0:4] + text[5:7] + text[8:10] + text[11:13] + text[14:16] + text[17:19])
    try:
        codec.ts64sec_to_datetime(t)
    except InvalidEncodingError as exc:
        raise MalformedBoundError(f"not a valid instant: {text!r}") from exc
    return t


def to_baseline(records: Iterable[tuple[int, float]]) -> Iterator[BaselineRecord]:
    """Render Ts64Sec records as fixed-width ISO text (lexicographic = chronological)."""
    for t, v in records:
        yield BaselineRecord(int_to_iso(t), v)


def baseline_range_scan(stream: Iterable[BaselineRecord], lo_text: str, hi_text: str) -> list[BaselineRecord]:
    """Linear scan with string comparison, inclusive on both ends."""
    iso_to_int(lo_text)
    iso_to_int(hi_text)
    return [r for r in stream if lo_text <= r.ts_text <= hi_text]


class BaselineTable:
    """The control arm's store: text timestamps, parsed on insert, scanned on query."""

    def __init__(self):
        self.rows: list[BaselineRecord] = []

    def write_batch(self, batch: Sequence[BaselineRecord]) -> list[int]:
        prev = ""
        for r in batch:
            datetime.fromisoformat(r.ts_text)
            if r.ts_text < prev:
                raise UnsortedBatchError(f"batch not sorted at {r.ts_text}")
            prev = r.ts_text
        self.rows.extend(batch)
        return [len(self.rows)]

    def range_scan(self, lo_text: str, hi_text: str) -> list[BaselineRecord]:
        return baseline_range_scan(self.rows, lo_text, hi_text)

    @property
    def nbytes(self) -> int:
        return len(self.rows) * (ISO_LENGTH + 8)

    @property
    def ts_bytes(self) -> int:
        return len(self.rows) * ISO_LENGTH


# defaults used when a scenario is asked for by record count
SCENARIO_DEFAULTS = {
    "hft": dict(rate=50.0),
    "cdr": dict(rate=2.0),
    "iot": dict(devices=10, cadence_s=10.0),
}


def scenario_spec(kind: str, records: int, seed: int = 0, fmt: Format = Format.TS64SEC) -> WorkloadSpec:
    """A spec of ``kind`` expected to yield at least ``records`` records."""
    params = SCENARIO_DEFAULTS.get(kind)
    if params is None:
        raise InvalidSpecError(f"unknown workload kind {kind!r}")
    if kind == "iot":
        per_second = params["devices"] / params["cadence_s"]
        duration = max(1.0, records / per_second)
    else:
        duration = max(1.0, records / params["rate"])
    return WorkloadSpec(kind, duration_s=duration, seed=seed, fmt=fmt, **params)


def scenario_records(kind: str, records: int, seed: int = 0, fmt: Format = Format.TS64SEC) -> list[Record]:
    """Exactly ``records`` records of ``kind``: the prefix of a long enough run.

    The duration doubles until the run is long enough, so the result depends
    only on the arguments.
    """
    if records < 1:
        raise InvalidSpecError("records must be positive")
    spec = scenario_spec(kind, records, seed, fmt)
    while True:
        out = list(islice(generate(spec), records))
        if len(out) == records:
            return out
        spec = replace(spec, duration_s=spec.duration_s * 2)
