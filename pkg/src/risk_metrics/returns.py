"""Return streams and their per-period moments."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Literal, Union

import numpy as np

from .errors import AlignmentError, DomainError, InsufficientDataError

Estimator = Literal["population", "sample"]
ESTIMATORS = ("population", "sample")
TRADING_DAYS = 252


def _check_estimator(estimator: str) -> None:
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be 'population' or 'sample', got {estimator!r}")


@dataclass(frozen=True)
class ReturnSeries:
    """Ordered net per-period returns.

    Attributes:
        returns: Net returns ``r_i`` (0.01 is +1%). Every element must exceed -1.
        periods_per_year: Annualisation count, 252 for daily data, 12 for monthly.
        label: Free text.
        dates: Optional period-end dates, one per return.
    """

    returns: tuple[float, ...]
    periods_per_year: int = TRADING_DAYS
    label: str = ""
    dates: tuple[date, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        values = tuple(float(r) for r in self.returns)
        object.__setattr__(self, "returns", values)
        if not isinstance(self.periods_per_year, (int, np.integer)) or self.periods_per_year < 1:
            raise ValueError(f"periods_per_year must be a positive integer, got {self.periods_per_year!r}")
        for i, r in enumerate(values):
            if not math.isfinite(r):
                raise DomainError(f"return #{i} is not finite: {r}")
            if r <= -1.0:
                raise DomainError(f"return #{i} is {r}; returns must exceed -1")
        if self.dates is not None:
            dates = tuple(self.dates)
            if len(dates) != len(values):
                raise AlignmentError(f"{len(dates)} dates for {len(values)} returns")
            object.__setattr__(self, "dates", dates)

    def __len__(self) -> int:
        return len(self.returns)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.returns, dtype=float)

    def with_returns(self, returns: Sequence[float]) -> ReturnSeries:
        """Copy with new values and the same metadata."""
        return replace(self, returns=tuple(returns))

    def slice(self, start: int, stop: int) -> ReturnSeries:
        dates = None if self.dates is None else self.dates[start:stop]
        return replace(self, returns=self.returns[start:stop], dates=dates)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    std_dev: float
    count: int
    estimator: Estimator = "sample"

    def __post_init__(self) -> None:
        _check_estimator(self.estimator)
        if not self.std_dev >= 0.0:
            raise ValueError(f"std_dev must be >= 0, got {self.std_dev}")
        if self.estimator == "sample" and self.count < 2:
            raise InsufficientDataError(f"sample estimator needs count >= 2, got {self.count}")

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_dev": self.std_dev,
            "count": self.count,
            "estimator": self.estimator,
        }


def _summarize(values: np.ndarray, estimator: str) -> MomentSummary:
    _check_estimator(estimator)
    n = len(values)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}")
    mean = float(np.mean(values))
    # exact zero for constant input (np.mean can be off by an ulp)
    if np.all(values == values[0]):
        mean, std = float(values[0]), 0.0
    else:
        std = float(np.std(values, ddof=1 if estimator == "sample" else 0))
    return MomentSummary(mean=mean, std_dev=std, count=n, estimator=estimator)


def moments(series: ReturnSeries, estimator: Estimator = "sample") -> MomentSummary:
    """Mean and standard deviation of the net returns.

    ``estimator="sample"`` divides the sum of squares by ``n - 1``,
    ``"population"`` by ``n``.
    """
    return _summarize(series.as_array(), estimator)


def log_moments(series: ReturnSeries, estimator: Estimator = "sample") -> MomentSummary:
    """Moments of the log gross returns ``log(1 + r_i)``."""
    return _summarize(np.log1p(series.as_array()), estimator)


def prices_to_returns(
    prices: Sequence[float],
    periods_per_year: int = TRADING_DAYS,
    label: str = "",
    dates: Sequence[date] | None = None,
) -> ReturnSeries:
    """Simple returns ``p[i+1] / p[i] - 1`` from a price path.

    ``dates``, if given, are the price dates; each return takes the date of
    the later price.
    """
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or len(p) < 2:
        raise InsufficientDataError(f"need at least 2 prices, got {p.size}")
    if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
        bad = int(np.flatnonzero(~(np.isfinite(p) & (p > 0.0)))[0])
        raise DomainError(f"price #{bad} is {p[bad]}; prices must be positive")
    r = p[1:] / p[:-1] - 1.0
    ret_dates = None if dates is None else tuple(dates)[1:]
    return ReturnSeries(tuple(r.tolist()), periods_per_year, label, ret_dates)


RiskFree = Union[ReturnSeries, Sequence[float], float]


def risk_free_array(risk_free: RiskFree, length: int) -> np.ndarray:
    """Broadcast a constant or per-period risk-free input to ``length`` values."""
    if isinstance(risk_free, (int, float, np.floating, np.integer)):
        return np.full(length, float(risk_free))
    rf = risk_free.as_array() if isinstance(risk_free, ReturnSeries) else np.asarray(risk_free, dtype=float)
    if rf.shape != (length,):
        raise AlignmentError(f"risk-free series has {rf.size} values, returns have {length}")
    return rf


def excess_returns(series: ReturnSeries, risk_free: RiskFree = 0.0) -> ReturnSeries:
    """Element-wise ``r_i - rf_i``; metadata preserved."""
    rf = risk_free_array(risk_free, len(series))
    if (
        isinstance(risk_free, ReturnSeries)
        and series.dates is not None
        and risk_free.dates is not None
        and series.dates != risk_free.dates
    ):
        raise AlignmentError("risk-free dates do not match return dates")
    return series.with_returns((series.as_array() - rf).tolist())
