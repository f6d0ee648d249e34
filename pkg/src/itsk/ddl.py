"""SQL DDL templates for storing integer timestamps in a DBMS.

The PostgreSQL generated column uses the place values that actually
produce ``YYYYMMDDhhmmss`` (year * 10^10, month * 10^8, day * 10^6, ...).
A month multiplier of 10^9 would overlap the day digits.
"""

from __future__ import annotations

POSTGRES = """\
-- Integer surrogate keys for time (PostgreSQL).
-- time_int = YYYYMMDDhhmmss. Place values: year*10^10, month*10^8, day*10^6,
-- hour*10^4, minute*10^2, second*1. (A month multiplier of 10^9 is a known
-- error in circulating versions of this template: it collides with the day
-- digits.)
CREATE TABLE events (
    id         BIGSERIAL PRIMARY KEY,
    event_time TIMESTAMP NOT NULL,
    time_int   BIGINT GENERATED ALWAYS AS (
        EXTRACT(YEAR   FROM event_time)::bigint * 10000000000 +
        EXTRACT(MONTH  FROM event_time)::bigint * 100000000 +
        EXTRACT(DAY    FROM event_time)::bigint * 1000000 +
        EXTRACT(HOUR   FROM event_time)::bigint * 10000 +
        EXTRACT(MINUTE FROM event_time)::bigint * 100 +
        FLOOR(EXTRACT(SECOND FROM event_time))::bigint
    ) STORED
);

CREATE INDEX idx_events_time_int ON events (time_int);

-- Range search (inclusive bounds):
--   SELECT * FROM events WHERE time_int BETWEEN 20230101000000 AND 20230131235959;
-- Hourly binning:
--   SELECT (time_int / 10000) * 10000 AS hour_bin, COUNT(*) FROM events GROUP BY hour_bin;

-- Daily range partitions on the integer key.
CREATE TABLE measurements (
    time_int BIGINT NOT NULL,
    value    DOUBLE PRECISION
) PARTITION BY RANGE (time_int);

CREATE TABLE measurements_20230101 PARTITION OF measurements
    FOR VALUES FROM (20230101000000) TO (20230102000000);
"""

CLICKHOUSE = """\
-- Integer surrogate keys for time (ClickHouse).
-- ts = YYYYMMDDhhmmss (year*10^10 + month*10^8 + day*10^6 + hour*10^4 + minute*10^2 + second).
CREATE TABLE metrics (
    ts    UInt64 CODEC(Delta, ZSTD),
    value Float64
)
ENGINE = MergeTree()
PARTITION BY intDiv(ts, 1000000)
ORDER BY (ts);

-- Hourly binning:
--   SELECT intDiv(ts, 10000) * 10000 AS hour_bin, avg(value) FROM metrics GROUP BY hour_bin ORDER BY hour_bin;
"""

DIALECTS = {"postgres": POSTGRES, "clickhouse": CLICKHOUSE}


def render(dialect: str) -> str:
    try:
        return DIALECTS[dialect]
    except KeyError:
        raise ValueError(f"unknown dialect {dialect!r}; expected one of {', '.join(DIALECTS)}") from None
