"""CSV ingestion, risk-free alignment and rolling windows.

Files are UTF-8 CSV with a ``date,value`` header, ISO ``YYYY-MM-DD`` dates in
strictly increasing order, and LF or CRLF line endings. Consecutive rows are
consecutive trading periods; calendar gaps are ignored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date
from typing import Literal

from .errors import AlignmentError, DomainError, EmptyInputError, InsufficientDataError, ParseError
from .returns import TRADING_DAYS, ReturnSeries, prices_to_returns

Format = Literal["returns", "prices"]
FORMATS = ("returns", "prices")
HEADER = "date,value"

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_ISO_DAY = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class SeriesFile:
    format: Format
    rows: tuple[tuple[date, float], ...]
    periods_per_year: int = TRADING_DAYS

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        rows = tuple((d, float(v)) for d, v in self.rows)
        object.__setattr__(self, "rows", rows)
        for i in range(1, len(rows)):
            if rows[i][0] <= rows[i - 1][0]:
                raise ParseError(f"date {rows[i][0]} does not follow {rows[i - 1][0]}", line=i + 2)

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(d for d, _ in self.rows)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def _parse_value(text: str, line: int) -> float:
    text = text.strip()
    if not text:
        raise ParseError("missing value", line=line)
    if not _DECIMAL.match(text):
        raise ParseError(f"not a decimal number: {text!r}", line=line)
    value = float(text)
    if not math.isfinite(value):
        raise ParseError(f"value out of range: {text!r}", line=line)
    return value


def _parse_date(text: str, line: int) -> date:
    text = text.strip()
    if not _ISO_DAY.match(text):
        raise ParseError(f"not an ISO YYYY-MM-DD date: {text!r}", line=line)
    try:
        return date.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"invalid date {text!r}: {exc}", line=line) from None


def parse_series(data: bytes | str, format: Format, periods_per_year: int = TRADING_DAYS) -> SeriesFile:
    """Parse a ``date,value`` CSV.

    Raises:
        EmptyInputError: no header or no data rows.
        ParseError: any malformed, blank or out-of-order row; the message and
            ``exc.line`` carry the 1-based line number.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    data = data.removeprefix("\ufeff")
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    if not lines:
        raise EmptyInputError("empty input")
    if lines[0].strip().lower() != HEADER:
        raise ParseError(f"expected header {HEADER!r}, got {lines[0]!r}", line=1)
    if len(lines) == 1:
        raise EmptyInputError("no data rows after header")

    rows: list[tuple[date, float]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        fields = raw.split(",")
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}: {raw!r}", line=lineno)
        d = _parse_date(fields[0], lineno)
        v = _parse_value(fields[1], lineno)
        if rows and d <= rows[-1][0]:
            raise ParseError(f"date {d} is not after previous date {rows[-1][0]}", line=lineno)
        rows.append((d, v))
    return SeriesFile(format, tuple(rows), periods_per_year)


def serialize_series(sf: SeriesFile) -> str:
    """Inverse of :func:`parse_series`; values use Python's shortest round-trip repr."""
    out = [HEADER]
    out.extend(f"{d.isoformat()},{v!r}" for d, v in sf.rows)
    return "\n".join(out) + "\n"


def read_series(path, format: Format, periods_per_year: int = TRADING_DAYS) -> SeriesFile:
    with open(path, "rb") as fh:
        return parse_series(fh.read(), format, periods_per_year)


def to_return_series(sf: SeriesFile, label: str = "") -> ReturnSeries:
    """Dated returns from a file; price files lose their first row."""
    if sf.format == "prices":
        return prices_to_returns(sf.values, sf.periods_per_year, label, sf.dates)
    return ReturnSeries(sf.values, sf.periods_per_year, label, sf.dates)


def annual_to_per_period(rate: float, periods_per_year: int, arithmetic: bool = False) -> float:
    """Per-period rate equivalent to an annual rate.

    Geometric by default: ``(1 + R)**(1/p) - 1``. ``arithmetic=True`` gives
    the conventional ``R / p``.
    """
    if arithmetic:
        return rate / periods_per_year
    if rate <= -1.0:
        raise DomainError(f"annual rate {rate} must exceed -1 for geometric conversion")
    return math.expm1(math.log1p(rate) / periods_per_year)


def per_period_to_annual(rate: float, periods_per_year: int, arithmetic: bool = False) -> float:
    if arithmetic:
        return rate * periods_per_year
    return math.expm1(math.log1p(rate) * periods_per_year)


def align_risk_free(
    series: ReturnSeries,
    rf: SeriesFile | float,
    arithmetic: bool = False,
) -> ReturnSeries:
    """Per-period risk-free rates matching ``series`` period by period.

    A constant ``rf`` is an annual rate converted with
    :func:`annual_to_per_period`. A :class:`SeriesFile` holds per-period rates
    and is joined on exact date; it may cover extra dates.
    """
    ppy = series.periods_per_year
    if isinstance(rf, SeriesFile):
        if series.dates is None:
            raise AlignmentError("dated risk-free file needs a dated return series")
        lookup = dict(rf.rows)
        values = []
        for d in series.dates:
            if d not in lookup:
                raise AlignmentError(f"risk-free series has no value for {d.isoformat()}")
            values.append(lookup[d])
        return ReturnSeries(tuple(values), ppy, "risk_free", series.dates)
    per_period = annual_to_per_period(float(rf), ppy, arithmetic)
    return ReturnSeries((per_period,) * len(series), ppy, "risk_free", series.dates)


@dataclass(frozen=True)
class RollingWindowConfig:
    window_length: int = TRADING_DAYS
    step: int = 1

    def __post_init__(self) -> None:
        if self.window_length < 2:
            raise DomainError(f"window_length must be >= 2, got {self.window_length}")
        if self.step < 1:
            raise DomainError(f"step must be >= 1, got {self.step}")


def window_count(length: int, config: RollingWindowConfig) -> int:
    if length < config.window_length:
        return 0
    return (length - config.window_length) // config.step + 1


def rolling_windows(series: ReturnSeries, config: RollingWindowConfig) -> list[tuple[date | int, ReturnSeries]]:
    """Trailing windows of exactly ``window_length`` periods.

    Each item is ``(end, window)`` where ``end`` is the last date in the
    window, or its 0-based index when the series is undated.
    """
    count = window_count(len(series), config)
    if count == 0:
        raise InsufficientDataError(
            f"series has {len(series)} periods, window needs {config.window_length}"
        )
    out = []
    for k in range(count):
        start = k * config.step
        stop = start + config.window_length
        end = series.dates[stop - 1] if series.dates is not None else stop - 1
        out.append((end, series.slice(start, stop)))
    return out
