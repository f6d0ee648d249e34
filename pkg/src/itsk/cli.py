"""``itsk`` command line.

Subcommands: gen, ingest, query, bench, tai, ddl, stats.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Sequence

from . import bench, codec, csvio, ddl, timescale
from .codec import CivilDateTime, Format
from .errors import ItskError
from .ingest import ingest_stream
from .store import Table
from .workloads import KINDS, WorkloadSpec, generate, to_baseline

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_arg(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"not a non-negative integer: {text!r}")
    return int(text)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("batch sizes must be positive")
    return values


def _bool_arg(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _fmt_arg(text: str) -> Format:
    try:
        fmt = Format.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown format {text!r}") from None
    if fmt is Format.TS32:
        raise argparse.ArgumentTypeError("use ts64sec or ts64frac")
    return fmt


def _start_arg(text: str) -> CivilDateTime:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"start must be a Ts64Sec integer: {text!r}")
    try:
        return codec.ts64sec_to_datetime(int(text))
    except ItskError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="itsk", description="Integer timestamp codec, store and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic workload as CSV")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--start", type=_start_arg, default=CivilDateTime(2023, 1, 1), help="Ts64Sec start instant")
    span = p.add_mutually_exclusive_group()
    span.add_argument("--seconds", type=float)
    span.add_argument("--minutes", type=float)
    span.add_argument("--hours", type=float)
    span.add_argument("--days", type=float)
    p.add_argument("--rate", type=float, default=10.0, help="events/s (hft, cdr)")
    p.add_argument("--devices", type=int, default=1, help="iot device count")
    p.add_argument("--cadence", type=float, default=5.0, help="iot seconds between readings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ts-format", type=_fmt_arg, default=Format.TS64SEC)
    p.add_argument("--out", type=Path, help="output CSV (default: stdout)")
    p.add_argument("--baseline-out", type=Path, help="also write the ISO-text baseline CSV")

    p = sub.add_parser("ingest", help="load a ts,value CSV into a table directory")
    p.add_argument("input", type=Path)
    p.add_argument("table", type=Path)
    p.add_argument("--batch-size", type=int, default=1000)
    p.add_argument("--sort", type=_bool_arg, default=True)
    p.add_argument("--ts-format", type=_fmt_arg, default=Format.TS64SEC, help="format for a new table")

    p = sub.add_parser("query", help="range query, optionally binned")
    p.add_argument("table", type=Path)
    p.add_argument("--from", dest="lo", type=_int_arg, required=True)
    p.add_argument("--to", dest="hi", type=_int_arg, required=True)
    p.add_argument("--bin", choices=("hour", "day", "month"))
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("bench", help="integer vs baseline ingest/query/storage benchmark")
    p.add_argument("--scenario", choices=KINDS, default="iot")
    p.add_argument("--records", type=int, default=100_000)
    p.add_argument("--batch-sizes", type=_int_list, default=[1, 100, 1000, 10000])
    p.add_argument("--arms", default="integer,baseline")
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("tai", help="convert between UTC and TAI Ts64Frac integers")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--utc", type=_int_arg)
    which.add_argument("--tai", type=_int_arg)
    p.add_argument("--table", type=Path, help=f"leap-second CSV (default: ${timescale.ENV_VAR} or built-in)")

    p = sub.add_parser("ddl", help="print SQL DDL templates")
    p.add_argument("--dialect", required=True, choices=sorted(ddl.DIALECTS))

    p = sub.add_parser("stats", help="storage report for a table directory")
    p.add_argument("table", type=Path)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    return parser


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args, out) -> int:
    if args.seconds is not None:
        duration = args.seconds
    elif args.hours is not None:
        duration = args.hours * 3600
    elif args.days is not None:
        duration = args.days * 86400
    else:
        duration = (args.minutes if args.minutes is not None else 1.0) * 60
    spec = WorkloadSpec(
        kind=args.kind,
        start=args.start,
        duration_s=duration,
        rate=args.rate,
        devices=args.devices,
        cadence_s=args.cadence,
        seed=args.seed,
        fmt=args.ts_format,
    )
    records = list(generate(spec))
    if args.out is None:
        csvio.write_records(records, out)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            csvio.write_records(records, fh)
    if args.baseline_out is not None:
        if args.ts_format is not Format.TS64SEC:
            raise UsageError("--baseline-out needs --ts-format ts64sec")
        with open(args.baseline_out, "w", encoding="utf-8", newline="") as fh:
            csvio.write_baseline(to_baseline(records), fh)
    print(f"{len(records)} records", file=sys.stderr if args.out is None else out)
    return EXIT_OK


def cmd_ingest(args, out) -> int:
    if (args.table / "table.json").exists():
        table = Table.open(args.table)
    else:
        table = Table(args.ts_format, args.table)
    with open(args.input, encoding="utf-8", newline="") as fh:
        report = ingest_stream(csvio.read_records(fh), table, args.batch_size, args.sort, table.format)
    print(
        f"{report.records_flushed} records, {report.batches} batches, "
        f"{report.segments_created} segments, {report.wall_time:.3f} s",
        file=out,
    )
    return EXIT_OK


def cmd_query(args, out) -> int:
    table = Table.open(args.table)
    writer = csv.writer(out, lineterminator="\n") if args.format == "csv" else None
    if args.bin:
        bins = table.aggregate_bins(args.lo, args.hi, args.bin)
        if writer:
            writer.writerow(["bin", "count", "sum", "min", "max", "mean"])
            for b in bins:
                writer.writerow([b.bin_label, b.count, repr(b.sum), repr(b.min), repr(b.max), repr(b.mean)])
        else:
            for b in bins:
                print(f"{b.bin_label}  n={b.count}  mean={b.mean:.6g}  min={b.min:.6g}  max={b.max:.6g}", file=out)
        return EXIT_OK
    rows = table.range_query(args.lo, args.hi)
    if writer:
        writer.writerow(["ts", "value"])
        for ts, v in rows:
            writer.writerow([ts, repr(v)])
    else:
        for ts, v in rows:
            print(f"{ts}  {v!r}", file=out)
    return EXIT_OK


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def cmd_bench(args, out) -> int:
    arms = [a.strip() for a in args.arms.split(",") if a.strip()]
    for a in arms:
        if a not in bench.ARMS:
            raise UsageError(f"unknown arm {a!r}; expected {', '.join(bench.ARMS)}")
    if args.records < 1 or args.repeats < 1 or args.warmup < 0:
        raise UsageError("--records and --repeats must be positive, --warmup non-negative")
    rows = bench.run_bench(args.scenario, args.records, args.batch_sizes, arms, args.warmup, args.repeats, args.seed)
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(bench.BENCH_COLUMNS)
        for r in rows:
            d = r.as_dict()
            writer.writerow(["" if d[c] is None else d[c] for c in bench.BENCH_COLUMNS])
        return EXIT_OK
    headers = bench.BENCH_COLUMNS
    cells = [[_fmt_cell(r.as_dict()[c]) for c in headers] for r in rows]
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(headers)]
    print("  ".join(h.rjust(w) for h, w in zip(headers, widths)), file=out)
    for row in cells:
        print("  ".join(c.rjust(w) for c, w in zip(row, widths)), file=out)
    return EXIT_OK


def cmd_tai(args, out) -> int:
    if args.table is not None:
        table = timescale.read_leap_table(args.table)
    else:
        table = timescale.table_from_env()
    if args.utc is not None:
        print(timescale.utc_to_tai(args.utc, table), file=out)
    else:
        print(timescale.tai_to_utc(args.tai, table), file=out)
    return EXIT_OK


def cmd_ddl(args, out) -> int:
    out.write(ddl.render(args.dialect))
    return EXIT_OK


def cmd_stats(args, out) -> int:
    report = Table.open(args.table).stats()
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["partition", "segments", "rows", "ts_bytes", "value_bytes", "index_bytes", "ratio"])
        for p in report.partitions:
            writer.writerow([p.key, p.segments, p.rows, p.ts_bytes, p.value_bytes, p.index_bytes, f"{float(p.ratio):.4f}"])
        writer.writerow(
            ["total", sum(p.segments for p in report.partitions), report.rows, report.ts_bytes,
             report.value_bytes, report.index_bytes, f"{float(report.ratio):.4f}"]
        )  # fmt: skip
        return EXIT_OK
    for p in report.partitions:
        print(
            f"{p.key}  segments={p.segments}  rows={p.rows}  ts_bytes={p.ts_bytes}  "
            f"value_bytes={p.value_bytes}  ratio={float(p.ratio):.2f}x",
            file=out,
        )
    print(
        f"total  rows={report.rows}  ts_bytes={report.ts_bytes}  value_bytes={report.value_bytes}  "
        f"ratio={float(report.ratio):.2f}x",
        file=out,
    )
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "ingest": cmd_ingest,
    "query": cmd_query,
    "bench": cmd_bench,
    "tai": cmd_tai,
    "ddl": cmd_ddl,
    "stats": cmd_stats,
}


def main(argv: Sequence[str] | None = None, out: io.TextIOBase | None = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ItskError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except Exception as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
