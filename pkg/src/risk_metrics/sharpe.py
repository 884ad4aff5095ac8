"""Sharpe-type statistics under i.i.d. per-period returns.

Four estimators live here:

* :func:`classical_sharpe` -- the usual ``sqrt(n) * (mu - rf) / sigma``.
* :func:`compounded_sharpe` -- the Sharpe ratio of the compounded yearly
  gross return ``X_n = prod(1 + r_i)``, i.e.
  ``((1 + mu)**n - 1) / sqrt(Var(X_n))`` with exact i.i.d. moments.
* :func:`compounded_sharpe_approx` -- its small-return approximation
  ``sqrt(n) * mu / ((1 + (n - 1) mu) sigma)``.
* :func:`log_sharpe` -- the classical ratio computed on ``log(1 + r_i)``.

Everything that can overflow is carried as a :class:`LogValue`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    ApproximationDomainError,
    DomainError,
    OutOfRangeError,
    RiskMetricsError,
    UndefinedMetricError,
)
from .logspace import LOG10_E, ZERO, LogValue, log_expm1, log_neg_expm1
from .returns import (
    Estimator,
    MomentSummary,
    ReturnSeries,
    RiskFree,
    excess_returns,
    log_moments,
    moments,
    risk_free_array,
)

BINOMIAL_MAX_N = 30


def _check_periods(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"number of periods must be a positive integer, got {n}")


def _check_mean(mu: float) -> None:
    if not mu > -1.0:
        raise DomainError(f"per-period mean must exceed -1, got {mu}")


def classical_sharpe(m: MomentSummary, n: int, rf_per_period: float = 0.0) -> float:
    """Annualised Sharpe ratio ``sqrt(n) * (mean - rf) / std``.

    Raises:
        UndefinedMetricError: if ``m.std_dev`` is zero.
    """
    _check_periods(n)
    if m.std_dev == 0.0:
        raise UndefinedMetricError("classical Sharpe undefined: zero volatility", metric="classical")
    return math.sqrt(n) * (m.mean - rf_per_period) / m.std_dev


@dataclass(frozen=True)
class AnnualMoments:
    """Mean and variance of ``X_n``, the product of ``n`` i.i.d. gross returns."""

    expected_gross: LogValue
    variance: LogValue
    n: int

    @property
    def std_dev(self) -> LogValue:
        return self.variance.sqrt()


def annual_moments(mu: float, sigma: float, n: int) -> AnnualMoments:
    """Exact ``E(X_n)`` and ``Var(X_n)`` in log space.

    Uses ``E(X_n) = (1 + mu)**n`` and
    ``Var(X_n) = ((1 + mu)**2 + sigma**2)**n - (1 + mu)**(2 n)``, the latter
    rewritten as ``(1 + mu)**(2 n) * expm1(n * log1p((sigma / (1 + mu))**2))``
    so that no intermediate overflows.
    """
    _check_mean(mu)
    _check_periods(n)
    if not sigma >= 0.0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    log_gross = math.log1p(mu)
    expected = LogValue(1, n * log_gross)
    if sigma == 0.0:
        return AnnualMoments(expected, ZERO, n)
    log_ratio_sq = 2.0 * (math.log(sigma) - log_gross)
    # log(expm1(n * log1p(z))) with z = (sigma/(1+mu))**2, never forming z when extreme
    if log_ratio_sq < -50.0:
        # z < 2e-22: log1p(z) = z and expm1(y) = y(1 + y/2) to double precision
        y = n * math.exp(log_ratio_sq)
        log_excess = math.log(n) + log_ratio_sq + math.log1p(0.5 * y)
    else:
        if log_ratio_sq > 40.0:
            growth = log_ratio_sq + math.log1p(math.exp(-log_ratio_sq))
        else:
            growth = math.log1p(math.exp(log_ratio_sq))
        log_excess = log_expm1(n * growth)
    variance = LogValue(1, 2.0 * n * log_gross + log_excess)
    return AnnualMoments(expected, variance, n)


def annual_variance_binomial(mu: float, sigma: float, n: int) -> float:
    """Reference ``Var(X_n)`` as the term-by-term binomial sum.

    ``sum_{i=1..n} C(n, i) sigma**(2 i) (1 + mu)**(2 n - 2 i)``. Plain double
    arithmetic; only valid for ``n <= 30``.
    """
    _check_periods(n)
    if n > BINOMIAL_MAX_N:
        raise OutOfRangeError(f"binomial form limited to n <= {BINOMIAL_MAX_N}; use annual_moments")
    _check_mean(mu)
    s2 = sigma * sigma
    g2 = (1.0 + mu) ** 2
    total = 0.0
    for i in range(1, n + 1):
        total += comb(n, i) * s2**i * g2 ** (n - i)
    return total


@dataclass(frozen=True)
class CompoundedSharpe:
    """Result of :func:`compounded_sharpe`.

    ``value`` is the ratio as a double, or ``None`` when it is outside the
    normal double range. ``log10`` is ``log10(|I_a|)`` (``-inf`` when the ratio
    is exactly zero) and ``sign`` its sign.
    """

    value: float | None
    log10: float
    sign: int
    log_value: LogValue

    def __iter__(self):
        yield self.value
        yield self.log10


def _growth_minus_one(mu: float, n: int) -> LogValue:
    """``(1 + mu)**n - 1`` as a signed LogValue."""
    x = n * math.log1p(mu)
    if x == 0.0:
        return ZERO
    if x > 0.0:
        return LogValue(1, log_expm1(x))
    return LogValue(-1, log_neg_expm1(x))


def _materialize(v: LogValue) -> float | None:
    return v.to_float() if v.fits_double() else None


def compounded_sharpe(mu: float, sigma: float, n: int) -> CompoundedSharpe:
    """Sharpe ratio of the compounded ``n``-period return.

    ``((1 + mu)**n - 1) / sqrt(Var(X_n))`` under i.i.d. returns with per-period
    mean ``mu`` and standard deviation ``sigma``.

    Raises:
        UndefinedMetricError: ``sigma == 0``.
        DomainError: ``mu <= -1``.
    """
    _check_mean(mu)
    if sigma == 0.0:
        raise UndefinedMetricError("compounded Sharpe undefined: zero volatility", metric="compounded")
    am = annual_moments(mu, sigma, n)
    ratio = _growth_minus_one(mu, n) / am.std_dev
    return CompoundedSharpe(
        value=_materialize(ratio),
        log10=ratio.log_magnitude * LOG10_E,
        sign=ratio.sign,
        log_value=ratio,
    )


def correction_factor(mu: float, n: int) -> float:
    """``1 + (n - 1) mu``, the gap between the classical and compounded ratios."""
    return 1.0 + (n - 1) * mu


def compounded_sharpe_approx(mu: float, sigma: float, n: int) -> tuple[float, float]:
    """Small-return approximation ``sqrt(n) mu / ((1 + (n-1) mu) sigma)``.

    Returns:
        ``(approximation, correction_factor)``.
    """
    _check_periods(n)
    if sigma == 0.0:
        raise UndefinedMetricError("approximate compounded Sharpe undefined: zero volatility", metric="approx_compounded")
    factor = correction_factor(mu, n)
    if factor <= 0.0:
        raise ApproximationDomainError(
            f"1 + (n-1)*mu = {factor} <= 0; approximation undefined", metric="approx_compounded"
        )
    return math.sqrt(n) * mu / (factor * sigma), factor


def log_sharpe(
    series: ReturnSeries,
    rf_per_period: RiskFree = 0.0,
    estimator: Estimator = "sample",
    n: int | None = None,
) -> float:
    """Sharpe ratio of log gross returns.

    ``sqrt(n) * mean(log(1 + r_i) - log(1 + rf_i)) / std(log(1 + r_i))`` with
    ``n`` defaulting to ``series.periods_per_year``.
    """
    n = series.periods_per_year if n is None else n
    _check_periods(n)
    rf = risk_free_array(rf_per_period, len(series))
    if np.any(rf <= -1.0):
        raise DomainError("risk-free rate must exceed -1", metric="log_sharpe")
    lm = log_moments(series, estimator)
    if lm.std_dev == 0.0:
        raise UndefinedMetricError("log Sharpe undefined: zero log volatility", metric="log_sharpe")
    excess = float(np.mean(np.log1p(series.as_array()) - np.log1p(rf)))
    return math.sqrt(n) * excess / lm.std_dev


def log_sharpe_equivalent(mu: float, sigma: float, n: int) -> float:
    """First-order closed-form stand-in for the log Sharpe given net moments.

    Uses ``E log(1+r) ~ log1p(mu)`` and ``sd log(1+r) ~ sigma / (1 + mu)``.
    """
    _check_mean(mu)
    _check_periods(n)
    if sigma == 0.0:
        raise UndefinedMetricError("log Sharpe undefined: zero volatility", metric="log_sharpe")
    return math.sqrt(n) * math.log1p(mu) * (1.0 + mu) / sigma


@dataclass(frozen=True)
class SharpeReport:
    classical: float
    compounded: float | None
    compounded_log10: float
    compounded_sign: int
    approx_compounded: float
    log_sharpe: float
    correction_factor: float
    moments: MomentSummary
    n: int

    def to_dict(self) -> dict:
        return {
            "classical": self.classical,
            "compounded": self.compounded,
            "compounded_log10": self.compounded_log10,
            "compounded_sign": self.compounded_sign,
            "approx_compounded": self.approx_compounded,
            "log_sharpe": self.log_sharpe,
            "correction_factor": self.correction_factor,
            "inputs": {"moments": self.moments.to_dict(), "n": self.n},
        }


def _tag(exc: RiskMetricsError, metric: str) -> RiskMetricsError:
    if exc.metric is None:
        exc.metric = metric
    return exc


def full_report(
    series: ReturnSeries,
    rf: RiskFree = 0.0,
    estimator: Estimator = "sample",
    n: int | None = None,
) -> SharpeReport:
    """All four statistics from one series.

    Moments are taken once, on the excess returns ``r_i - rf_i``; the
    compounded ratio and its approximation use those excess moments (with
    ``rf = 0`` this is the plain formula). The log Sharpe subtracts
    ``log(1 + rf_i)`` in log space.

    Errors from any constituent propagate with ``exc.metric`` naming it.
    """
    n = series.periods_per_year if n is None else n
    ex = excess_returns(series, rf)
    m = moments(ex, estimator)

    def run(metric, fn, *args):
        try:
            return fn(*args)
        except RiskMetricsError as exc:
            raise _tag(exc, metric)

    classical = run("classical", classical_sharpe, m, n, 0.0)
    comp = run("compounded", compounded_sharpe, m.mean, m.std_dev, n)
    approx, factor = run("approx_compounded", compounded_sharpe_approx, m.mean, m.std_dev, n)
    ls = run("log_sharpe", log_sharpe, series, rf, estimator, n)
    return SharpeReport(
        classical=classical,
        compounded=comp.value,
        compounded_log10=comp.log10,
        compounded_sign=comp.sign,
        approx_compounded=approx,
        log_sharpe=ls,
        correction_factor=factor,
        moments=m,
        n=n,
    )
