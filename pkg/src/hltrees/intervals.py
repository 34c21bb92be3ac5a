"""Certified interval arithmetic over exact rationals.

Endpoints are ``Fraction``s. Square roots are rounded outward with
``math.isqrt`` at a relative precision given in bits, so every interval is
guaranteed to contain the true real value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import DomainError

DEFAULT_PRECISION = 128
MAX_PRECISION = 1 << 14


def _log2_floor(x: Fraction) -> int:
    """``floor(log2(x))`` for ``x > 0``."""
    e = x.numerator.bit_length() - x.denominator.bit_length()
    # 2^e is within a factor 2 of x; fix up
    if e >= 0:
        if x < (1 << e):
            e -= 1
    elif x < Fraction(1, 1 << -e):
        e -= 1
    return e


def sqrt_bounds(x: Fraction, bits: int) -> tuple:
    """Dyadic ``(lo, hi)`` with ``lo <= sqrt(x) <= hi`` and ``hi - lo <= 2**-bits * sqrt(x)``."""
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"square root of negative number {x}")
    if x == 0:
        return Fraction(0), Fraction(0)
    # scale so that sqrt(x) * 2^s has about bits + 2 integer bits
    s = bits + 2 - _log2_floor(x) // 2
    if s >= 0:
        root = isqrt((x.numerator << (2 * s)) // x.denominator)
        lo = Fraction(root, 1 << s)
        ulp = Fraction(1, 1 << s)
    else:
        root = isqrt(x.numerator // (x.denominator << (-2 * s)))
        lo = Fraction(root << -s)
        ulp = Fraction(1 << -s)
    return lo, (lo if lo * lo == x else lo + ulp)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.exact(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return Interval(self.hi * self.hi, self.lo * self.lo)
        return Interval(0, max(self.lo * self.lo, self.hi * self.hi))

    def sqrt(self, bits: int = DEFAULT_PRECISION) -> "Interval":
        if self.lo < 0:
            raise DomainError(f"square root of interval reaching below zero: {self}")
        return Interval(sqrt_bounds(self.lo, bits)[0], sqrt_bounds(self.hi, bits)[1])

    def certainly_le(self, other) -> bool | None:
        """``True``/``False`` when ``self <= other`` is decided for all contained values, else ``None``."""
        o = self._coerce(other)
        if self.hi <= o.lo:
            return True
        if self.lo > o.hi:
            return False
        return None

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def decide_le(compute, max_bits: int = MAX_PRECISION, start: int = DEFAULT_PRECISION) -> tuple:
    """Widen precision until ``compute(bits)`` returns a pair of intervals whose order is decided.

    Returns ``(verdict, bits)``; ``verdict`` is ``None`` if still undecided at ``max_bits``.
    """
    bits = start
    while True:
        a, b = compute(bits)
        v = a.certainly_le(b)
        if v is not None or bits >= max_bits:
            return v, bits
        bits *= 2
