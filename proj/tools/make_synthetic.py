#!/usr/bin/env python3
"""Regenerates the bundled synthetic panel and monthly price index.

BP is a trend plus two tones; SPI co-moves negatively with BP's fast tone;
gold, silver and WTI are independent random walks. Output is deterministic.
"""
import argparse
import datetime as dt
from pathlib import Path

import numpy as np

N = 99
START = dt.date(2016, 11, 8)
END = dt.date(2017, 2, 15)
HOLIDAY = dt.date(2016, 12, 25)


def panel(rng):
    t = np.arange(N)
    bp = 700.0 + 3.2 * t + 25.0 * np.sin(2 * np.pi * t / 4.3) + 60.0 * np.sin(2 * np.pi * t / 24.0)
    bp += rng.normal(0.0, 4.0, N)
    fast = 25.0 * np.sin(2 * np.pi * t / 4.3)
    spi = 2150.0 + 0.9 * t - 0.4 * fast + 8.0 * np.sin(2 * np.pi * t / 31.0) + rng.normal(0.0, 3.0, N)
    gold = 1250.0 + np.cumsum(rng.normal(0.0, 8.0, N))
    silver = 17.5 + np.cumsum(rng.normal(0.0, 0.2, N))
    wti = 50.0 + np.cumsum(rng.normal(0.0, 0.8, N))
    return {"BP": bp, "SPI": spi, "gold": gold, "silver": silver, "WTI": wti}


def calendar():
    days = [START + dt.timedelta(days=i) for i in range((END - START).days + 1)]
    days = [d for d in days if d != HOLIDAY]
    assert len(days) == N
    return days


def write_panel(path, cols):
    with open(path, "w", newline="\n") as f:
        f.write("date," + ",".join(cols) + "\n")
        for i, day in enumerate(calendar()):
            f.write(day.isoformat() + "," + ",".join(f"{cols[c][i]:.4f}" for c in cols) + "\n")


def write_cpi(path):
    months = [dt.date(2016, 11, 1), dt.date(2016, 12, 1), dt.date(2017, 1, 1), dt.date(2017, 2, 1), dt.date(2017, 3, 1)]
    values = [241.353, 241.432, 242.839, 243.603, 243.801]
    with open(path, "w", newline="\n") as f:
        f.write("date,CPI\n")
        for m, v in zip(months, values):
            f.write(f"{m.isoformat()},{v}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--seed", type=int, default=20161108)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    write_panel(args.out / "synthetic_panel.csv", panel(np.random.default_rng(args.seed)))
    write_cpi(args.out / "cpi_monthly.csv")


if __name__ == "__main__":
    main()
