import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itsk.errors import FormatMismatchError, InvalidTimestampError, StoreWriteError
from itsk.ingest import BatchBuffer, FlushReport, Record, ingest_stream
from itsk.store import Table

T0 = 20230101000000


class Sink:
    """Records every batch it receives; fails on demand."""

    def __init__(self):
        self.batches = []
        self.fail = False

    def write_batch(self, batch):
        if self.fail:
            raise OSError("disk full")
        self.batches.append(list(batch))
        return [(0, len(self.batches))]


def test_flushes_at_capacity():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=3)
    assert buf.append((T0, 1.0)) is None
    assert buf.append((T0 + 1, 2.0)) is None
    report = buf.append((T0 + 2, 3.0))
    assert report.records_flushed == 3 and report.batches == 1
    assert len(buf) == 0
    assert [len(b) for b in sink.batches] == [3]


def test_capacity_one_streams():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=1)
    for i in range(5):
        assert buf.append((T0 + i, 0.0)).records_flushed == 1
    assert [len(b) for b in sink.batches] == [1] * 5


@pytest.mark.parametrize("capacity", [0, -1, 50_001])
def test_capacity_bounds(capacity):
    with pytest.raises(ValueError):
        BatchBuffer(Sink(), capacity=capacity)


def test_invalid_timestamp_leaves_buffer_unchanged():
    buf = BatchBuffer(Sink(), capacity=10)
    buf.append((T0, 1.0))
    with pytest.raises(InvalidTimestampError):
        buf.append((20231301000000, 1.0))
    assert buf.pending == [Record(T0, 1.0)]


def test_format_mismatch():
    buf = BatchBuffer(Sink(), capacity=10)
    with pytest.raises(FormatMismatchError):
        buf.append((T0 * 10**5 + 7, 1.0))
    frac = BatchBuffer(Sink(), capacity=10, fmt="frac")
    with pytest.raises(FormatMismatchError):
        frac.append((T0, 1.0))


def test_flush_sorts_stably():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=10)
    for rec in [(T0 + 3, 3.0), (T0 + 1, 1.0), (T0 + 3, 3.5), (T0 + 2, 2.0), (T0 + 1, 1.5)]:
        buf.append(rec)
    buf.flush()
    assert sink.batches == [[(T0 + 1, 1.0), (T0 + 1, 1.5), (T0 + 2, 2.0), (T0 + 3, 3.0), (T0 + 3, 3.5)]]


def test_flush_without_sort_keeps_arrival_order():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=10, sort_on_flush=False)
    buf.append((T0 + 3, 0.0))
    buf.append((T0 + 1, 0.0))
    buf.flush()
    assert [r.ts for r in sink.batches[0]] == [T0 + 3, T0 + 1]


def test_empty_flush_is_noop():
    sink = Sink()
    report = BatchBuffer(sink).flush()
    assert report.records_flushed == 0 and report.batches == 0
    assert sink.batches == []


def test_partial_flush():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=1000)
    for i in range(5):
        buf.append((T0 + i, float(i)))
    assert buf.flush().records_flushed == 5


def test_failed_flush_retains_pending():
    sink = Sink()
    buf = BatchBuffer(sink, capacity=10)
    buf.append((T0, 1.0))
    buf.append((T0 + 1, 2.0))
    sink.fail = True
    with pytest.raises(StoreWriteError):
        buf.flush()
    assert len(buf) == 2
    sink.fail = False
    assert buf.flush().records_flushed == 2
    assert len(sink.batches[0]) == 2


@pytest.mark.parametrize("n, batches, last", [(10_000, 10, 1000), (10_001, 11, 1)])
def test_stream_batch_counts(n, batches, last):
    sink = Sink()
    report = ingest_stream(((T0 + (i % 60), float(i)) for i in range(n)), sink, capacity=1000)
    assert report.batches == batches
    assert report.records_flushed == n
    assert len(sink.batches[-1]) == last


def test_stream_error_has_position():
    records = [(T0, 0.0), (T0 + 1, 0.0), (20230132000000, 0.0)]
    with pytest.raises(InvalidTimestampError, match="record 2"):
        ingest_stream(records, Sink())


def test_stream_into_table():
    table = Table()
    records = [(20230101000000 + (2499 - i) // 60 * 100 + (2499 - i) % 60, float(i)) for i in range(2500)]
    report = ingest_stream(records, table, capacity=1000)
    assert report.records_flushed == 2500
    assert report.segments_created == sum(len(table.segments(k)) for k in table.partition_keys())
    assert sorted(table.rows()) == sorted(records)


def test_report_addition():
    a = FlushReport(3, 1, 1, 0.5, 0.5)
    b = FlushReport(2, 1, 2, 0.25, 0.25)
    s = a + b
    assert (s.records_flushed, s.batches, s.segments_created) == (5, 2, 3)
    assert s.batch_latency == pytest.approx(0.375)


tagged = st.lists(st.tuples(st.integers(0, 20), st.integers()), max_size=300)


@settings(max_examples=200)
@given(tagged, st.integers(1, 40), st.booleans())
def test_conservation_bound_stability(items, capacity, sort):
    sink = Sink()
    records = [(T0 + s, float(i)) for i, (s, _) in enumerate(items)]  # value = arrival index
    report = ingest_stream(records, sink, capacity=capacity, sort=sort)
    flat = [r for b in sink.batches for r in b]
    assert report.records_flushed == len(flat) == len(records)
    assert sorted(flat) == sorted(records)
    assert all(1 <= len(b) <= capacity for b in sink.batches)
    # batches partition the arrival sequence into consecutive runs of capacity
    sizes = [len(b) for b in sink.batches]
    assert sizes == [capacity] * (len(records) // capacity) + ([len(records) % capacity] if len(records) % capacity else [])
    for k, b in enumerate(sink.batches):
        chunk = records[k * capacity : (k + 1) * capacity]
        if sort:
            assert b == sorted(chunk, key=lambda r: r[0])  # sorted() is stable
            for x, y in zip(b, b[1:]):
                assert x.ts < y.ts or (x.ts == y.ts and x.value < y.value)
        else:
            assert b == chunk


@given(tagged, st.integers(1, 40))
def test_deterministic_partitioning(items, capacity):
    records = [(T0 + s, float(i)) for i, (s, _) in enumerate(items)]
    a, b = Sink(), Sink()
    ingest_stream(records, a, capacity=capacity)
    ingest_stream(records, b, capacity=capacity)
    assert a.batches == b.batches
