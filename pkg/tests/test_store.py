import math
import threading
from itertools import groupby

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import civil_datetimes, random_datetimes
from itsk import codec
from itsk.compression import BLOCK_SIZE, compression_ratio, serialized_size
from itsk.errors import (
    CorruptSegmentError,
    FormatMismatchError,
    InvalidDateError,
    InvalidRangeError,
    UnsortedBatchError,
)
from itsk.store import ScanStats, Segment, Table, table_from_rows

DIGITS = {"hour": 10, "day": 8, "month": 6}


def sec_rows(rng, n, lo_year=2022, hi_year=2023):
    ts = [codec.datetime_to_ts64sec(c) for c in random_datetimes(rng, n, lo_year, hi_year, frac=False)]
    return list(zip(ts, rng.normal(size=n).tolist()))


def oracle_layout(batches, day):
    """Expected storage order: day ascending, then batch order, then sorted row order."""
    by_day = {}
    for batch in batches:
        for key, rows in groupby(sorted(batch, key=lambda r: r[0]), key=lambda r: day(r[0])):
            by_day.setdefault(key, []).extend(rows)
    return [r for key in sorted(by_day) for r in by_day[key]]


def group_by_oracle(rows, lo, hi, unit, width=14):
    """Group by zeroing the trailing digits of the decimal string."""
    keep = DIGITS[unit]
    acc = {}
    for t, v in rows:
        if lo <= t <= hi:
            s = str(t).zfill(width)
            label = int(s[:keep]) * 10 ** (width - keep)
            acc.setdefault(label, []).append(v)
    return {k: (len(v), math.fsum(v), min(v), max(v)) for k, v in acc.items()}


def test_batch_spanning_two_days():
    table = Table()
    rows = [(20230101235958, 1.0), (20230101235959, 2.0), (20230102000000, 3.0)]
    ids = table.write_batch(rows)
    assert [k for k, _ in ids] == [20230101, 20230102]
    assert table.partition_keys() == [20230101, 20230102]
    assert [len(table.segments(k)) for k in table.partition_keys()] == [1, 1]


def test_batch_within_hour(rng):
    rows = sorted((20230101120000 + m * 100 + s, float(s)) for m in range(60) for s in range(0, 60, 3))
    table = Table()
    assert len(table.write_batch(rows)) == 1
    seg = table.segments(20230101)[0]
    seg.validate()
    assert seg.row_count == len(rows)
    assert len(seg.block_index) == math.ceil(len(rows) / BLOCK_SIZE)


def test_unsorted_batch():
    with pytest.raises(UnsortedBatchError):
        Table().write_batch([(20230101000001, 0.0), (20230101000000, 0.0)])


def test_wrong_format_batch():
    with pytest.raises(FormatMismatchError):
        Table().write_batch([(2023010100000000000, 0.0)])
    with pytest.raises(FormatMismatchError):
        Table("frac").write_batch([(20230101000000, 0.0)])


def test_january_query(rng):
    rows = sec_rows(rng, 5000)
    table = table_from_rows(rows)
    got = table.range_query(20230101000000, 20230131235959)
    want = [r for r in sorted(rows, key=lambda r: r[0]) if str(r[0]).startswith("202301")]
    assert got == want


def test_point_query():
    rows = [(20230101000000, 1.0), (20230101000005, 2.0), (20230101000005, 3.0), (20230101000009, 4.0)]
    table = table_from_rows(rows)
    assert table.range_query(20230101000005, 20230101000005) == [(20230101000005, 2.0), (20230101000005, 3.0)]


@pytest.mark.parametrize("lo, hi", [(20230102000000, 20230101000000), (-1, 5)])
def test_invalid_range(lo, hi):
    with pytest.raises(InvalidRangeError):
        Table().range_query(lo, hi)


def test_aggregate_example():
    table = table_from_rows([(20230101120001, 2.0), (20230101123000, 4.0), (20230101130000, 9.0)])
    bins = table.aggregate_bins(20230101000000, 20230101235959, "hour")
    assert [(b.bin_label, b.mean) for b in bins] == [(20230101120000, 3.0), (20230101130000, 9.0)]
    assert (bins[0].count, bins[0].sum, bins[0].min, bins[0].max) == (2, 6.0, 2.0, 4.0)


def test_aggregate_singleton_and_empty():
    table = table_from_rows([(20230101120001, 2.5)])
    (b,) = table.aggregate_bins(20230101000000, 20230101235959, "day")
    assert (b.bin_label, b.mean) == (20230101000000, 2.5)
    assert table.aggregate_bins(20230102000000, 20230102235959, "hour") == []


def test_aggregate_month_labels_and_unit_check():
    table = table_from_rows([(20230115000000, 1.0), (20230201000000, 2.0)])
    bins = table.aggregate_bins(20230101000000, 20231231235959, "month")
    assert [b.bin_label for b in bins] == [20230100000000, 20230200000000]
    with pytest.raises(ValueError, match="unknown unit"):
        table.aggregate_bins(20230101000000, 20231231235959, "millisecond")


def test_drop_partitions():
    table = table_from_rows([(20221231120000, 1.0), (20230101120000, 2.0)])
    assert table.drop_partitions_before(20230101) == 1
    assert table.partition_keys() == [20230101]
    assert table.rows() == [(20230101120000, 2.0)]
    assert table.drop_partitions_before(20200101) == 0
    assert table.drop_partitions_before(20300101) == 1
    assert table.partition_keys() == []
    with pytest.raises(InvalidDateError):
        table.drop_partitions_before(20230230)


def test_stats_empty():
    report = Table().stats()
    assert (report.rows, report.ts_bytes, report.value_bytes, report.ratio) == (0, 0, 0, 0)


def test_stats_full_day_size_formula():
    ts = [20230101000000 + h * 10**4 + m * 100 + s for h in range(24) for m in range(60) for s in range(60)]
    table = table_from_rows([(t, 0.0) for t in ts])
    report = table.stats()
    (seg,) = table.segments(20230101)
    entries = [0] + [2 * (b - a) for a, b in zip(ts, ts[1:])]  # zigzag of a positive delta
    widths = [max(entries[i : i + BLOCK_SIZE]).bit_length() for i in range(0, len(entries), BLOCK_SIZE)]
    counts = [len(entries[i : i + BLOCK_SIZE]) for i in range(0, len(entries), BLOCK_SIZE)]
    assert report.ts_bytes == serialized_size(zip(counts, widths)) == seg.ts_column.nbytes
    assert report.value_bytes == 8 * 86400
    assert report.rows == 86400
    assert report.ratio == compression_ratio(seg.ts_column)


def test_persistence_round_trip(tmp_path, rng):
    rows = sec_rows(rng, 3000, 2023, 2023)
    table = Table("sec", tmp_path / "t")
    table.write_batch(sorted(rows[:1500]))
    table.write_batch(sorted(rows[1500:]))
    assert (tmp_path / "t" / "table.json").exists()
    reopened = Table.open(tmp_path / "t")
    assert reopened.partition_keys() == table.partition_keys()
    assert reopened.rows() == table.rows()
    reopened.write_batch([(20231231235959, 1.0)])
    assert len(Table.open(tmp_path / "t")) == 3001
    reopened.drop_partitions_before(20230601)
    assert all(k >= 20230601 for k in Table.open(tmp_path / "t").partition_keys())


def test_segment_bytes_layout():
    seg = Segment.build([20230101000000, 20230101000001], [1.5, -2.0])
    data = seg.to_bytes(codec.Format.TS64SEC)
    assert data[:4] == b"ITSK"
    assert data[4:6] == (1).to_bytes(2, "little")
    assert data[6] == 1
    assert int.from_bytes(data[7:15], "little") == 2
    assert int.from_bytes(data[15:23], "little") == 20230101000000
    assert np.frombuffer(data[-16:], "<f8").tolist() == [1.5, -2.0]
    fmt, back = Segment.from_bytes(data)
    assert fmt is codec.Format.TS64SEC and back.timestamps() == seg.timestamps()


@pytest.mark.parametrize("mutate", [lambda d: d[:-1], lambda d: b"XXXX" + d[4:], lambda d: d[:30]])
def test_corrupt_segment(mutate):
    data = Segment.build(list(range(20230101000000, 20230101000050)), [0.0] * 50).to_bytes(codec.Format.TS64SEC)
    with pytest.raises(CorruptSegmentError):
        Segment.from_bytes(mutate(data))


def test_corrupt_segment_on_open(tmp_path):
    table = Table("sec", tmp_path)
    table.write_batch([(20230101000000, 0.0)])
    (seg_file,) = (tmp_path / "20230101").glob("*.seg")
    seg_file.write_bytes(seg_file.read_bytes()[:-3])
    with pytest.raises(CorruptSegmentError):
        Table.open(tmp_path)


def test_validator_catches_bad_index():
    seg = Segment.build([1, 2, 3], [0.0] * 3)
    bad = Segment(seg.ts_column, seg.values, ((1, 4),), 3)
    with pytest.raises(CorruptSegmentError):
        bad.validate()


def test_pruning_counters(rng):
    batches = [sec_rows(rng, 2000, 2023, 2023) for _ in range(3)]
    table = Table()
    for b in batches:
        table.write_batch(sorted(b))
    keys = table.partition_keys()
    for _ in range(50):
        a, b = sorted(rng.choice(len(keys), 2).tolist())
        lo = keys[a] * 10**6 + int(rng.integers(0, 24)) * 10**4
        hi = keys[b] * 10**6 + 235959
        stats = ScanStats()
        got = table.range_query(lo, hi, stats)
        in_range = [k for k in keys if lo // 10**6 <= k <= hi // 10**6]
        assert stats.partitions_opened == len(in_range)
        hit = sum(1 for k in in_range for s in table.segments(k) for mn, mx in s.block_index if mx >= lo and mn <= hi)
        total = sum(len(s.block_index) for k in in_range for s in table.segments(k))
        assert stats.blocks_decompressed == hit
        assert stats.blocks_skipped == total - hit
        assert stats.rows_returned == len(got)


def test_ts64frac_table(rng):
    cs = random_datetimes(rng, 2000, 2023, 2023)
    rows = [(codec.datetime_to_ts64frac(c), float(i)) for i, c in enumerate(cs)]
    table = table_from_rows(rows, "frac")
    assert all(k == t // 10**11 for k in table.partition_keys() for t, _ in table.range_query(k * 10**11, k * 10**11 + 235959_99999))
    lo, hi = 20230301000000_00000, 20230331235959_99999
    assert table.range_query(lo, hi) == [r for r in sorted(rows) if lo <= r[0] <= hi]
    bins = table.aggregate_bins(lo, hi, "day")
    oracle = group_by_oracle(rows, lo, hi, "day", width=19)
    assert {b.bin_label: b.count for b in bins} == {k: v[0] for k, v in oracle.items()}


def test_concurrent_readers_see_snapshots(rng):
    table = Table()
    fixed = sorted(sec_rows(rng, 3000, 2022, 2022))
    table.write_batch(fixed)
    expect = [r for r in fixed if 20220301000000 <= r[0] <= 20220630235959]
    errors = []

    def reader():
        try:
            for _ in range(20):
                assert table.range_query(20220301000000, 20220630235959) == expect
                table.stats()
        except Exception as exc:  # pragma: no cover - reported below
            errors.append(exc)

    def writer():
        for d in range(1, 29):
            table.write_batch([(20230200000000 + d * 10**6 + s, 0.0) for s in range(0, 60, 5)])

    threads = [threading.Thread(target=reader) for _ in range(4)] + [threading.Thread(target=writer)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(table) == 3000 + 28 * 12


sec_instants = civil_datetimes(2022, 2023, frac=False).map(codec.datetime_to_ts64sec)
batches_st = st.lists(st.lists(st.tuples(sec_instants, st.floats(-1e6, 1e6)), min_size=1, max_size=200), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(batches_st, sec_instants, sec_instants)
def test_range_query_matches_linear_scan(batches, a, b):
    lo, hi = min(a, b), max(a, b)
    table = Table()
    for batch in batches:
        table.write_batch(sorted(batch, key=lambda r: r[0]))
    layout = oracle_layout(batches, lambda t: t // 10**6)
    assert table.rows() == layout
    assert table.range_query(lo, hi) == [r for r in layout if lo <= r[0] <= hi]
    for seg in (s for k in table.partition_keys() for s in table.segments(k)):
        seg.validate()
    for key in table.partition_keys():
        assert all(t // 10**6 == key for s in table.segments(key) for t in s.timestamps())


@settings(max_examples=60, deadline=None)
@given(batches_st, sec_instants, sec_instants, st.sampled_from(["hour", "day", "month"]))
def test_aggregate_matches_group_by(batches, a, b, unit):
    lo, hi = min(a, b), max(a, b)
    table = Table()
    for batch in batches:
        table.write_batch(sorted(batch, key=lambda r: r[0]))
    rows = [r for batch in batches for r in batch]
    oracle = group_by_oracle(rows, lo, hi, unit)
    bins = table.aggregate_bins(lo, hi, unit)
    assert [x.bin_label for x in bins] == sorted(oracle)
    for x in bins:
        n, s, mn, mx = oracle[x.bin_label]
        assert (x.count, x.min, x.max) == (n, mn, mx)
        assert x.sum == pytest.approx(s, rel=1e-9, abs=1e-6)
        assert x.min <= x.mean <= x.max or math.isclose(x.mean, x.min) or math.isclose(x.mean, x.max)
