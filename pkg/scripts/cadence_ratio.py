"""Compression ratio of one day of regularly spaced Ts64Sec stamps, by cadence.

Shows where the 4x floor sits: per-second data packs at about 8.7x, while
sparse cadences pay more per value for minute and hour rollovers.
"""

import argparse
from datetime import datetime, timedelta

from itsk.compression import compress_column, compression_ratio


def day_stamps(cadence_s: int, day: datetime = datetime(2023, 1, 1)) -> list[int]:
    out = []
    t = day
    end = day + timedelta(days=1)
    while t < end:
        out.append(int(t.strftime("%Y%m%d%H%M%S")))
        t += timedelta(seconds=cadence_s)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cadences", default="1,2,5,10,30,60,300,3600")
    args = ap.parse_args()
    print(f"{'cadence_s':>9} {'rows':>6} {'bytes':>7} {'ratio':>6}")
    for c in (int(x) for x in args.cadences.split(",")):
        col = compress_column(day_stamps(c))
        print(f"{c:9d} {col.total_count:6d} {col.nbytes:7d} {float(compression_ratio(col)):6.2f}")


if __name__ == "__main__":
    main()
