"""Command-line front end.

Subcommands ``compute``, ``compare``, ``simulate`` and ``rolling``. Data goes
to stdout (JSON or CSV), errors go to stderr as one JSON object. Exit codes:
0 success, 2 input/domain error, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .errors import RiskMetricsError
from .ingest import (
    RollingWindowConfig,
    SeriesFile,
    align_risk_free,
    read_series,
    rolling_windows,
    to_return_series,
)
from .logspace import LOG10_E, LogValue
from .montecarlo import DistributionSpec, oracle_check
from .returns import TRADING_DAYS, MomentSummary, excess_returns, moments
from .sharpe import (
    classical_sharpe,
    compounded_sharpe,
    compounded_sharpe_approx,
    full_report,
    log_sharpe,
    log_sharpe_equivalent,
)

SCHEMA_VERSION = 1
SEED_ENV = "RISK_METRICS_SEED"
DEFAULT_SEED = 0


class UsageError(RiskMetricsError):
    kind = "usage_error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(obj):
    """Replace non-finite floats by ``None`` so the JSON stays strict."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, LogValue):
        return _logvalue_dict(obj)
    return obj


def _logvalue_dict(v: LogValue) -> dict:
    return {
        "sign": v.sign,
        "log10": None if v.sign == 0 else v.log_magnitude * LOG10_E,
        "value": v.to_float() if v.fits_double() else None,
    }


def dumps(doc: dict) -> str:
    # json writes floats with repr(), which round-trips exactly
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _document(command: dict, payload: dict, warnings: list[str]) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **payload, "warnings": warnings}


def _risk_free(series, rf_text: str, arithmetic: bool, periods: int):
    try:
        rate = float(rf_text)
    except ValueError:
        rf: SeriesFile | float = read_series(rf_text, "returns", periods)
    else:
        if not math.isfinite(rate):
            raise UsageError(f"--rf must be finite, got {rf_text!r}")
        rf = rate
    return align_risk_free(series, rf, arithmetic=arithmetic)


def _load(args):
    sf = read_series(args.input, args.format, args.periods)
    series = to_return_series(sf, label=os.path.basename(args.input))
    rf = _risk_free(series, args.rf, args.rf_arithmetic, args.periods)
    return series, rf


def cmd_compute(args) -> str:
    series, rf = _load(args)
    report = full_report(series, rf, args.estimator, args.periods)
    warnings = []
    if report.compounded is None:
        warnings.append("compounded Sharpe is outside the double range; use compounded_log10")
    command = {
        "name": "compute",
        "input": args.input,
        "format": args.format,
        "rf": args.rf,
        "rf_arithmetic": args.rf_arithmetic,
        "estimator": args.estimator,
        "periods_per_year": args.periods,
    }
    return dumps(_document(command, {"report": report.to_dict()}, warnings))


def _log_ratio(a: LogValue, b: LogValue) -> float | None:
    if a.is_zero() or b.is_zero():
        return None
    q = a / b
    return q.to_float() if q.fits_double() else None


def compare_table(mu: float, sigma: float, n: int) -> dict:
    """All closed-form statistics for per-period moments ``mu``, ``sigma``."""
    m = MomentSummary(mean=mu, std_dev=sigma, count=0, estimator="population")
    classical = classical_sharpe(m, n, 0.0)
    comp = compounded_sharpe(mu, sigma, n)
    approx, factor = compounded_sharpe_approx(mu, sigma, n)
    log_eq = log_sharpe_equivalent(mu, sigma, n)
    c, a = LogValue.from_float(classical), LogValue.from_float(approx)
    return {
        "classical": classical,
        "compounded": comp.value,
        "compounded_log10": comp.log10,
        "compounded_sign": comp.sign,
        "approx_compounded": approx,
        "log_sharpe_equivalent": log_eq,
        "correction_factor": factor,
        "ratios": {
            "classical_over_compounded": _log_ratio(c, comp.log_value),
            "classical_over_approx": _log_ratio(c, a),
            "compounded_over_approx": _log_ratio(comp.log_value, a),
        },
    }


def _fmt(x) -> str:
    return "NA" if x is None else f"{x:.6g}"


def compare_text(table: dict) -> str:
    rows = [
        ("S_a (classical)", table["classical"]),
        ("I_a (compounded)", table["compounded"]),
        ("log10 |I_a|", table["compounded_log10"]),
        ("I_a approx", table["approx_compounded"]),
        ("L_a equivalent", table["log_sharpe_equivalent"]),
        ("S_a / I_a", table["ratios"]["classical_over_compounded"]),
        ("1 + (n-1) mu", table["correction_factor"]),
        ("S_a / approx", table["ratios"]["classical_over_approx"]),
        ("I_a / approx", table["ratios"]["compounded_over_approx"]),
    ]
    width = max(len(name) for name, _ in rows)
    return "".join(f"{name:<{width}}  {_fmt(val):>14}\n" for name, val in rows)


def cmd_compare(args) -> str:
    table = compare_table(args.mu, args.sigma, args.n)
    if args.output == "text":
        return compare_text(table)
    command = {"name": "compare", "mu": args.mu, "sigma": args.sigma, "n": args.n}
    return dumps(_document(command, {"comparison": table}, []))


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def cmd_simulate(args) -> str:
    spec = DistributionSpec.parse(args.dist)
    seed = resolve_seed(args.seed)
    check = oracle_check(spec, args.n, args.trials, seed, workers=args.workers)
    sim = check.simulation
    warnings = []
    if sim.rejection_warning:
        warnings.append(f"{sim.rejection_fraction:.4%} of trials rejected (return <= -1)")
    payload = {
        "per_period": check.per_period.to_dict(),
        "analytic": {
            "mean_Xn": check.analytic_mean_Xn,
            "var_Xn": check.analytic_var_Xn,
            "var_Xn_binomial": check.binomial_var_Xn,
        },
        "empirical": {
            "mean_Xn": sim.empirical_mean_Xn,
            "var_Xn": sim.empirical_var_Xn,
            "standard_error_mean": sim.standard_error_mean,
            "log_mean": sim.log_mean,
            "log_mean_se": sim.log_mean_se,
            "trials": sim.trials,
            "attempted": sim.attempted,
            "rejected": sim.rejected,
            "rejection_fraction": sim.rejection_fraction,
        },
        "deviation": {
            "mean_z": check.mean_z,
            "var_rel_dev": check.var_rel_dev,
            "var_rel_dev_binomial": check.var_rel_dev_binomial,
            "log_mean_z": check.log_mean_z,
        },
    }
    # workers is deliberately not echoed: output must not depend on it
    command = {"name": "simulate", "dist": spec.to_dict(), "n": args.n, "trials": args.trials, "seed": seed}
    return dumps(_document(command, payload, warnings))


ROLLING_COLUMNS = ("window_end_date", "S_a", "I_a_log10", "L_a", "approx", "I_a_sign")


def _metric(fn, *args):
    try:
        return fn(*args)
    except RiskMetricsError:
        return None


def cmd_rolling(args) -> str:
    series, rf = _load(args)
    config = RollingWindowConfig(args.window, args.step)
    rf_windows = dict(rolling_windows(rf, config))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROLLING_COLUMNS)
    for end, window in rolling_windows(series, config):
        rf_window = rf_windows[end]
        comp = s_a = approx = None
        m = _metric(lambda: moments(excess_returns(window, rf_window), args.estimator))
        if m is not None:
            s_a = _metric(classical_sharpe, m, args.periods, 0.0)
            comp = _metric(compounded_sharpe, m.mean, m.std_dev, args.periods)
            approx = _metric(lambda: compounded_sharpe_approx(m.mean, m.std_dev, args.periods)[0])
        l_a = _metric(log_sharpe, window, rf_window, args.estimator, args.periods)
        end_text = end.isoformat() if hasattr(end, "isoformat") else str(end)
        cells = [s_a, None if comp is None else comp.log10, l_a, approx]
        writer.writerow(
            [end_text]
            + ["NA" if v is None or not math.isfinite(v) else repr(v) for v in cells]
            + ["NA" if comp is None else comp.sign]
        )
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="risk-metrics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def series_args(p):
        p.add_argument("--input", required=True, help="date,value CSV file")
        p.add_argument("--format", choices=("returns", "prices"), default="returns")
        p.add_argument("--rf", default="0", help="annual risk-free rate, or a per-period rate CSV file")
        p.add_argument("--rf-arithmetic", action="store_true", help="convert annual rf as R/periods instead of geometrically")
        p.add_argument("--estimator", choices=("sample", "population"), default="sample")
        p.add_argument("--periods", type=int, default=TRADING_DAYS, help="periods per year")

    p = sub.add_parser("compute", help="all Sharpe statistics for one series")
    series_args(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("compare", help="closed-form statistics from per-period mean and std")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n", type=int, default=TRADING_DAYS)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo check of the compounded moments")
    p.add_argument("--dist", required=True, help="normal:mu,sigma | twopoint:u,d,p | lognormal:m,s")
    p.add_argument("--n", type=int, default=TRADING_DAYS)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then {DEFAULT_SEED}")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rolling", help="statistics over trailing windows, as CSV")
    series_args(p)
    p.add_argument("--window", type=int, default=TRADING_DAYS)
    p.add_argument("--step", type=int, default=1)
    p.set_defaults(func=cmd_rolling)
    return parser


def _fail(payload: dict, code: int, stderr) -> int:
    stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        out = args.func(args)
    except RiskMetricsError as exc:
        return _fail(exc.to_dict(), 2, stderr)
    except OSError as exc:
        return _fail({"error": "io_error", "message": str(exc)}, 2, stderr)
    except Exception as exc:  # noqa: BLE001
        return _fail({"error": "internal_error", "message": f"{type(exc).__name__}: {exc}"}, 1, stderr)
    stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
