"""Signed log-magnitude arithmetic.

Compounded moments such as ``(1 + mu)**(2 n)`` overflow a double long before
``n = 252`` for large per-period returns. :class:`LogValue` stores a real
number as ``sign * exp(log_magnitude)`` so products, quotients and powers are
additions in log space and never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG10_E = 1.0 / math.log(10.0)
# smallest/largest log-magnitudes of a normal double
_LOG_MIN_NORMAL = math.log(2.2250738585072014e-308)
_LOG_MAX = math.log(1.7976931348623157e308)


def log_expm1(x: float) -> float:
    """Return ``log(exp(x) - 1)`` for ``x > 0`` without overflow."""
    if x <= 0.0:
        raise ValueError(f"log_expm1 needs x > 0, got {x}")
    if x > 50.0:
        return x + math.log1p(-math.exp(-x))
    return math.log(math.expm1(x))


def log_neg_expm1(x: float) -> float:
    """Return ``log(1 - exp(x))`` for ``x < 0``."""
    if x >= 0.0:
        raise ValueError(f"log_neg_expm1 needs x < 0, got {x}")
    if x > -0.6931471805599453:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


@dataclass(frozen=True)
class LogValue:
    """A real number ``sign * exp(log_magnitude)``.

    ``sign`` is one of -1, 0, +1. When ``sign == 0`` the magnitude is ignored
    and normalised to ``-inf``.
    """

    sign: int
    log_magnitude: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", -math.inf)
        elif math.isnan(self.log_magnitude) or self.log_magnitude == math.inf:
            raise ValueError(f"log_magnitude must be finite, got {self.log_magnitude}")
        elif self.log_magnitude == -math.inf:
            object.__setattr__(self, "sign", 0)

    # construction -----------------------------------------------------

    @classmethod
    def from_float(cls, value: float) -> LogValue:
        if math.isnan(value) or math.isinf(value):
            raise ValueError(f"cannot encode non-finite value {value}")
        if value == 0.0:
            return ZERO
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> LogValue:
        return cls(sign, log_magnitude)

    # materialisation --------------------------------------------------

    @property
    def log10_magnitude(self) -> float:
        return self.log_magnitude * LOG10_E

    def is_zero(self) -> bool:
        return self.sign == 0

    def fits_double(self) -> bool:
        """True when ``to_float`` gives a normal (or zero) double."""
        return self.sign == 0 or _LOG_MIN_NORMAL <= self.log_magnitude < _LOG_MAX

    def to_float(self) -> float:
        """Materialise as a double.

        Raises:
            OverflowError: if the magnitude exceeds the double range.
        """
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __float__(self) -> float:
        return self.to_float()

    # arithmetic -------------------------------------------------------

    def __mul__(self, other: LogValue) -> LogValue:
        if not isinstance(other, LogValue):
            return NotImplemented
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return LogValue(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: LogValue) -> LogValue:
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("LogValue division by zero")
        if self.sign == 0:
            return ZERO
        return LogValue(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __neg__(self) -> LogValue:
        return LogValue(-self.sign, self.log_magnitude)

    def __abs__(self) -> LogValue:
        return LogValue(abs(self.sign), self.log_magnitude)

    def __pow__(self, exponent: float) -> LogValue:
        if self.sign == 0:
            if exponent <= 0:
                raise ZeroDivisionError("0 raised to a non-positive power")
            return ZERO
        if self.sign < 0:
            if float(exponent).is_integer():
                sign = -1 if int(exponent) % 2 else 1
                return LogValue(sign, self.log_magnitude * exponent)
            raise ValueError("fractional power of a negative LogValue")
        return LogValue(1, self.log_magnitude * exponent)

    def sqrt(self) -> LogValue:
        if self.sign < 0:
            raise ValueError("square root of a negative LogValue")
        return self ** 0.5

    def __add__(self, other: LogValue) -> LogValue:
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        big, small = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        diff = small.log_magnitude - big.log_magnitude  # <= 0
        if big.sign == small.sign:
            return LogValue(big.sign, big.log_magnitude + math.log1p(math.exp(diff)))
        if diff == 0.0:
            return ZERO
        return LogValue(big.sign, big.log_magnitude + log_neg_expm1(diff))

    def __sub__(self, other: LogValue) -> LogValue:
        if not isinstance(other, LogValue):
            return NotImplemented
        return self + (-other)

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogValue(0)"
        return f"LogValue({'-' if self.sign < 0 else '+'}exp({self.log_magnitude!r}))"


ZERO = LogValue(0, -math.inf)
ONE = LogValue(1, 0.0)


def log_product(values) -> LogValue:
    """Product of an iterable of LogValues."""
    out = ONE
    for v in values:
        out = out * v
    return out
