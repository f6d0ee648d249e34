"""Integer surrogate keys for time.

Calendar timestamps stored as plain integers (``20231027``,
``20230101120000``, ``2024010100000000000``), with the pieces needed to use
them as a storage engine key: codecs, TAI/UTC conversion, delta + bit-pack
compression, batched ingestion and a day-partitioned store.
"""

from .codec import (
    CivilDate,
    CivilDateTime,
    Format,
    date_to_int,
    datetime_to_ts64frac,
    datetime_to_ts64sec,
    int_to_date,
    pack_ts64,
    split_date_time,
    truncate,
    ts64frac_to_datetime,
    ts64sec_to_datetime,
    unpack_ts64,
)
from .compression import compress_column, compression_ratio, decompress_column
from .ingest import BatchBuffer, FlushReport, Record, ingest_stream
from .store import Table
from .timescale import LeapSecondTable, tai_to_utc, utc_to_tai

__version__ = "0.1.0"
