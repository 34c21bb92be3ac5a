from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hltrees.errors import DomainError
from hltrees.intervals import Interval, decide_le, sqrt_bounds

positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6)


@given(positive, st.integers(min_value=8, max_value=300))
def test_sqrt_bounds_bracket(x, bits):
    lo, hi = sqrt_bounds(x, bits)
    assert lo * lo <= x <= hi * hi
    assert (hi - lo) * (1 << bits) <= hi


def test_sqrt_exact_squares():
    assert sqrt_bounds(Fraction(9, 4), 64) == (Fraction(3, 2), Fraction(3, 2))
    assert sqrt_bounds(Fraction(0), 64) == (0, 0)
    with pytest.raises(DomainError):
        sqrt_bounds(Fraction(-1), 64)


def test_arithmetic():
    a = Interval(1, 2)
    b = Interval(-1, 3)
    assert a + b == Interval(0, 5)
    assert a - b == Interval(-2, 3)
    assert a * b == Interval(-2, 6)
    assert b.square() == Interval(0, 9)
    assert (-a) == Interval(-2, -1)
    assert Fraction(3, 2) in a
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_certainly_le():
    assert Interval(0, 1).certainly_le(1) is True
    assert Interval(2, 3).certainly_le(1) is False
    assert Interval(0, 2).certainly_le(1) is None


def test_decide_le_widens():
    # sqrt(2) <= 1.41421357 needs more than a handful of bits
    target = Interval.exact(Fraction(141421357, 10**8))
    verdict, bits = decide_le(lambda bits: (Interval.exact(2).sqrt(bits), target), start=4)
    assert verdict is True and bits > 4
    # equality can never be separated
    verdict, _ = decide_le(lambda bits: (Interval.exact(2).sqrt(bits), Interval.exact(2).sqrt(bits)), max_bits=256)
    assert verdict is None
