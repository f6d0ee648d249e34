"""Batch-size sweep over every scenario, integer arm vs ISO-text baseline.

Writes one CSV (columns as in ``itsk.bench.BENCH_COLUMNS``) to stdout or --out.
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from itsk.bench import BENCH_COLUMNS, run_bench
from itsk.workloads import KINDS


@dataclass
class SweepConfig:
    scenarios: tuple[str, ...] = KINDS
    records: int = 100_000
    batch_sizes: tuple[int, ...] = (1, 10, 100, 1000, 5000, 10000)
    warmup: int = 3
    repeats: int = 5
    seed: int = 0
    arms: tuple[str, ...] = field(default=("integer", "baseline"))


def sweep(cfg: SweepConfig, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for scenario in cfg.scenarios:
        for row in run_bench(scenario, cfg.records, cfg.batch_sizes, cfg.arms, cfg.warmup, cfg.repeats, cfg.seed):
            d = row.as_dict()
            writer.writerow(["" if d[c] is None else d[c] for c in BENCH_COLUMNS])
        out.flush()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--records", type=int, default=SweepConfig.records)
    ap.add_argument("--repeats", type=int, default=SweepConfig.repeats)
    ap.add_argument("--warmup", type=int, default=SweepConfig.warmup)
    ap.add_argument("--scenarios", default=",".join(KINDS))
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = SweepConfig(
        scenarios=tuple(args.scenarios.split(",")), records=args.records, warmup=args.warmup, repeats=args.repeats
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            sweep(cfg, fh)
    else:
        sweep(cfg, sys.stdout)


if __name__ == "__main__":
    main()
