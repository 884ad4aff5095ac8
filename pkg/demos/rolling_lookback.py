"""
One-year lookback ratios from a price file
==========================================

Writes a synthetic price CSV, then computes trailing 252-day statistics with
the library and with the command-line tool.
"""

import io
import tempfile
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from risk_metrics import RollingWindowConfig, full_report, read_series, rolling_windows, to_return_series
from risk_metrics.cli import main

rng = np.random.default_rng(0)
prices = 100 * np.cumprod(1 + rng.normal(0.0008, 0.012, 400))
start = date(2021, 1, 4)
lines = ["date,value"] + [f"{start + timedelta(days=i)},{p!r}" for i, p in enumerate(prices.tolist())]

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "prices.csv"
    path.write_text("\n".join(lines) + "\n")

    series = to_return_series(read_series(path, "prices"))
    windows = rolling_windows(series, RollingWindowConfig(252, step=50))
    for end, window in windows:
        rep = full_report(window)
        print(f"{end}  S_a {rep.classical:6.3f}  I_a {rep.compounded:6.3f}  L_a {rep.log_sharpe:6.3f}")

    out = io.StringIO()
    main(["rolling", "--input", str(path), "--format", "prices", "--window", "252", "--step", "50"], stdout=out)
    print(out.getvalue())
