"""Timestamp-column bytes per scenario and format against 19-byte ISO text.

Sizes are exact byte counts of the serialized columns, so the output is
deterministic for a given seed.
"""

import argparse
from dataclasses import dataclass

from itsk.codec import Format
from itsk.ingest import ingest_stream
from itsk.store import Table
from itsk.workloads import ISO_LENGTH, KINDS, scenario_records


@dataclass
class ReportConfig:
    records: int = 100_000
    batch_size: int = 1000
    seed: int = 0


def report(cfg: ReportConfig) -> list[dict]:
    rows = []
    for kind in KINDS:
        for fmt in (Format.TS64SEC, Format.TS64FRAC):
            records = scenario_records(kind, cfg.records, cfg.seed, fmt)
            table = Table(fmt)
            ingest_stream(records, table, capacity=cfg.batch_size, fmt=fmt)
            st = table.stats()
            baseline = ISO_LENGTH * len(records)
            rows.append(
                dict(
                    scenario=kind,
                    format=fmt.value,
                    rows=st.rows,
                    segments=sum(p.segments for p in st.partitions),
                    ts_bytes=st.ts_bytes,
                    bytes_per_row=st.ts_bytes / st.rows,
                    raw_ratio=float(st.ratio),
                    vs_iso_pct=100.0 * st.ts_bytes / baseline,
                )
            )
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--records", type=int, default=ReportConfig.records)
    ap.add_argument("--batch-size", type=int, default=ReportConfig.batch_size)
    ap.add_argument("--seed", type=int, default=ReportConfig.seed)
    args = ap.parse_args()
    rows = report(ReportConfig(args.records, args.batch_size, args.seed))
    print(f"{'scenario':8} {'format':9} {'rows':>8} {'segs':>5} {'ts_bytes':>9} {'B/row':>6} {'ratio':>6} {'vs ISO':>7}")
    for r in rows:
        print(
            f"{r['scenario']:8} {r['format']:9} {r['rows']:8d} {r['segments']:5d} {r['ts_bytes']:9d} "
            f"{r['bytes_per_row']:6.3f} {r['raw_ratio']:6.2f} {r['vs_iso_pct']:6.2f}%"
        )


if __name__ == "__main__":
    main()
