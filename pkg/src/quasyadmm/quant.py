"""Exact-rational asymmetric quantization.

The quantizer maps a real value to the integer floor of value/delta.  The
floor must be exact at boundaries: with delta = 1/10, the value 0.3 quantizes
to 3, which floating division (0.3/0.1 = 2.999...96) gets wrong.  All
comparisons therefore run in rational arithmetic.  A float input is read as
its shortest round-trip decimal (its repr), i.e. 0.3 means 3/10, not the
underlying binary 0.29999999999999998...; pass a Fraction, Decimal, int, or
string for explicit exact control.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational as _RationalABC

Rational = Fraction

Real = "int | float | Fraction | Decimal | str"


def parse_rational(text: str | int | float | Fraction) -> Fraction:
    """Parse a rational from a 'p/q' (or decimal) string; passes exact types through."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(repr(text))
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational from {text!r}: {exc}") from None


def _as_exact(value) -> Fraction:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot quantize non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (_RationalABC, int)):
        return Fraction(value)
    if isinstance(value, (Decimal, str)):
        return Fraction(value)
    raise TypeError(f"unsupported value type {type(value).__name__}")


@dataclass(frozen=True)
class QuantLevel:
    """A strictly positive rational quantization step."""

    delta: Fraction

    def __post_init__(self):
        if not isinstance(self.delta, Fraction):
            object.__setattr__(self, "delta", parse_rational(self.delta))
        if self.delta <= 0:
            raise ValueError(f"quantization level must be positive, got {self.delta}")

    def __truediv__(self, divisor: int) -> "QuantLevel":
        return QuantLevel(self.delta / divisor)

    def __float__(self) -> float:
        return float(self.delta)

    def __str__(self) -> str:
        return str(self.delta)


def level_for(epsilon: Fraction, delta: Fraction | None = None) -> QuantLevel:
    """Quantization level for a tolerance: default epsilon/3, any delta < epsilon/2.

    Accepts a coarser-than-default delta (still < epsilon/2) with a warning.
    """
    epsilon = parse_rational(epsilon)
    if epsilon <= 0:
        raise ValueError(f"error tolerance must be positive, got {epsilon}")
    if delta is None:
        return QuantLevel(epsilon / 3)
    delta = parse_rational(delta)
    if delta >= epsilon / 2:
        raise ValueError(
            f"quantization level {delta} must satisfy delta < epsilon/2 = {epsilon / 2}"
        )
    if delta >= epsilon / 3:
        warnings.warn(
            f"quantization level {delta} is coarser than the default epsilon/3 = {epsilon / 3}",
            stacklevel=2,
        )
    return QuantLevel(delta)


def quantize(value, level: QuantLevel) -> int:
    """Floor of value/delta, computed exactly.

    Guarantees q*delta <= value < (q+1)*delta under the exact reading of the
    input (floats read as their shortest round-trip decimal).
    """
    exact = _as_exact(value)
    num, den = exact.numerator, exact.denominator
    dnum, dden = level.delta.numerator, level.delta.denominator
    return (num * dden) // (den * dnum)


def dequantize(q: int, level: QuantLevel) -> float:
    """The real value q*delta, rounded once to float."""
    return float(q * level.delta)
