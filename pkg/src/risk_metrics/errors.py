"""Exception hierarchy.

Everything raised for bad inputs derives from :class:`RiskMetricsError`
(itself a ``ValueError``), which the CLI maps to exit code 2.
"""

from __future__ import annotations


class RiskMetricsError(ValueError):
    """Base class for all input/domain errors raised by this package."""

    kind = "error"

    def __init__(self, message: str, *, metric: str | None = None) -> None:
        super().__init__(message)
        self.metric = metric

    def to_dict(self) -> dict:
        out = {"error": self.kind, "message": str(self)}
        if self.metric is not None:
            out["metric"] = self.metric
        return out


class DomainError(RiskMetricsError):
    """A value lies outside the domain of a formula (e.g. a return <= -1)."""

    kind = "domain_error"


class InsufficientDataError(RiskMetricsError):
    """Too few observations for the requested estimate."""

    kind = "insufficient_data"


class UndefinedMetricError(RiskMetricsError):
    """A ratio whose denominator is zero (zero volatility)."""

    kind = "undefined_metric"


class ApproximationDomainError(DomainError):
    kind = "approximation_domain_error"


class OutOfRangeError(RiskMetricsError):
    kind = "out_of_range"


class AlignmentError(RiskMetricsError):
    """Two series cannot be matched element-wise or by date."""

    kind = "alignment_error"


class ParseError(RiskMetricsError):
    """Malformed input file. ``line`` is 1-based when known."""

    kind = "parse_error"

    def __init__(self, message: str, *, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.line is not None:
            out["line"] = self.line
        return out


class EmptyInputError(ParseError):
    kind = "empty_input"
