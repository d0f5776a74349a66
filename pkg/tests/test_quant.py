import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quasyadmm.quant import QuantLevel, dequantize, level_for, parse_rational, quantize

TENTH = QuantLevel(Fraction(1, 10))


def test_basic_floor():
    assert quantize(0.25, TENTH) == 2


def test_floor_of_negative():
    assert quantize(-0.25, TENTH) == -3


def test_exact_multiple_boundary():
    # 0.3/0.1 in floats is 2.999...96; the exact reading must give 3.
    assert quantize(0.3, TENTH) == 3
    assert quantize(Fraction(3, 10), TENTH) == 3
    assert quantize("0.3", TENTH) == 3


def test_dequantize_examples():
    assert dequantize(3, TENTH) == 0.3
    assert dequantize(-24, QuantLevel(Fraction(1, 100))) == -0.24


def test_integer_inputs():
    assert quantize(3, QuantLevel(Fraction(1))) == 3
    assert quantize(-3, QuantLevel(Fraction(2))) == -2


@given(st.floats(min_value=-1e9, max_value=1e9), st.integers(1, 10_000))
def test_round_trip_error_in_unit_interval(xi, den):
    level = QuantLevel(Fraction(1, den))
    q = quantize(xi, level)
    exact = Fraction(repr(xi))
    assert 0 <= exact - q * level.delta < level.delta


@given(
    st.floats(min_value=-1e6, max_value=1e6),
    st.floats(min_value=-1e6, max_value=1e6),
    st.integers(1, 1000),
)
def test_monotone_in_value(a, b, den):
    level = QuantLevel(Fraction(1, den))
    lo, hi = min(a, b), max(a, b)
    assert quantize(lo, level) <= quantize(hi, level)


@given(st.integers(-10_000, 10_000), st.integers(1, 500), st.integers(1, 50))
def test_exact_multiples_are_fixed_points(k, den, num):
    level = QuantLevel(Fraction(num, den))
    value = k * level.delta
    assert quantize(value, level) == k
    # the rational round trip is exact even when the float rendering is not
    assert quantize(value, level) * level.delta == value


def test_non_finite_rejected():
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            quantize(bad, TENTH)


def test_level_must_be_positive():
    with pytest.raises(ValueError):
        QuantLevel(Fraction(0))
    with pytest.raises(ValueError):
        QuantLevel(Fraction(-1, 10))


def test_level_for_default_is_third():
    assert level_for(Fraction(3, 100)).delta == Fraction(1, 100)


def test_level_for_rejects_half_or_coarser():
    with pytest.raises(ValueError, match="epsilon/2"):
        level_for(Fraction(3, 100), Fraction(2, 100))


def test_level_for_warns_between_third_and_half():
    with pytest.warns(UserWarning, match="coarser"):
        lvl = level_for(Fraction(3, 100), Fraction(14, 1000))
    assert lvl.delta == Fraction(14, 1000)


def test_level_for_accepts_finer_silently():
    lvl = level_for(Fraction(3, 100), Fraction(1, 1000))
    assert lvl.delta == Fraction(1, 1000)


def test_parse_rational():
    assert parse_rational("1/100") == Fraction(1, 100)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational(" 3 ") == Fraction(3)
    assert parse_rational(0.5) == Fraction(1, 2)
    with pytest.raises(ValueError):
        parse_rational("one/two")
    with pytest.raises(ValueError):
        parse_rational("1/0")
