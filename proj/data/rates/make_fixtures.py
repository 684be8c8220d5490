#!/usr/bin/env python3
"""Regenerates the bundled monthly rate fixtures from annual anchor values.

The fixtures are reconstructions for offline use, not official monthly
observations: annual anchors are interpolated to months (log-linear for
index levels, linear for yields). Re-running rewrites the CSV files
byte-for-byte.
"""
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent

# CPI-U, all items, annual averages 1984-2022.
CPI_ANNUAL = [103.9, 107.6, 109.6, 113.6, 118.3, 124.0, 130.7, 136.2, 140.3, 144.5, 148.2,
              152.4, 156.9, 160.5, 163.0, 166.6, 172.2, 177.1, 179.9, 184.0, 188.9, 195.3,
              201.6, 207.3, 215.3, 214.5, 218.1, 224.9, 229.6, 233.0, 236.7, 237.0, 240.0,
              245.1, 251.1, 255.7, 258.8, 271.0, 292.7]

# 3-month Treasury bill secondary-market yield, annual averages in percent, 1985-2022.
TBILL_ANNUAL = [7.48, 5.98, 5.82, 6.69, 8.12, 7.51, 5.42, 3.45, 3.02, 4.29, 5.51, 5.02, 5.07,
                4.81, 4.66, 5.85, 3.44, 1.62, 1.01, 1.38, 3.16, 4.73, 4.41, 1.48, 0.15, 0.14,
                0.05, 0.09, 0.06, 0.03, 0.05, 0.32, 0.93, 1.94, 2.06, 0.37, 0.04, 2.02]

# S&P 500 price index, year-end closes 1984-2022.
SP500_YEAR_END = [167.24, 211.28, 242.17, 247.08, 277.72, 353.40, 330.22, 417.09, 435.71,
                  466.45, 459.27, 615.93, 740.74, 970.43, 1229.23, 1469.25, 1320.28, 1148.08,
                  879.82, 1111.92, 1211.92, 1248.29, 1418.30, 1468.36, 903.25, 1115.10,
                  1257.64, 1257.60, 1426.19, 1848.36, 2058.90, 2043.94, 2238.83, 2673.61,
                  2506.85, 3230.78, 3756.07, 4766.18, 3839.50]


def interpolate(anchors, first_year, log_scale):
    """Monthly values with each annual anchor placed at mid-year."""
    xs = [12 * i + 5.5 for i in range(len(anchors))]
    ys = [math.log(a) if log_scale else a for a in anchors]
    out = []
    for m in range(12 * len(anchors)):
        k = min(max(0, next((i for i, x in enumerate(xs) if x > m), len(xs)) - 1), len(xs) - 2)
        v = ys[k] + (ys[k + 1] - ys[k]) * (m - xs[k]) / (xs[k + 1] - xs[k])
        out.append((first_year + m // 12, m % 12 + 1, math.exp(v) if log_scale else v))
    return out


def year_end_path(closes, first_year):
    """Month-end levels from December of first_year, geometric within each year."""
    out = [(first_year, 12, closes[0])]
    for i in range(1, len(closes)):
        g = (closes[i] / closes[i - 1]) ** (1 / 12)
        for m in range(1, 13):
            out.append((first_year + i, m, closes[i - 1] * g ** m))
    return out


def write(name, rows, digits):
    with open(HERE / name, "w", newline="\n") as f:
        f.write("date,value\n")
        for y, m, v in rows:
            f.write(f"{y:04d}-{m:02d},{v:.{digits}f}\n")


write("cpi.csv", interpolate(CPI_ANNUAL, 1984, True), 3)
write("tbill.csv", interpolate(TBILL_ANNUAL, 1985, False), 3)
write("sp500.csv", year_end_path(SP500_YEAR_END, 1984), 2)
