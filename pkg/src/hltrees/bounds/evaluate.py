"""Exact evaluation of bound expressions under a decimal-digit cap."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from ..errors import ConfigurationError, DomainError
from .expr import BinOp, BoundExpr, Call, Ceil, Const, Iter, Let, ListExpr, Var, to_text

DEFAULT_DIGIT_CAP = 10**6
DEFAULT_MAX_STEPS = 10**6
_LOG2_10 = 3.321928094887362


class CapExceeded(Exception):
    """Raised inside evaluation; turned into an :class:`EvalResult` at the top."""

    def __init__(self, reason: str, subterm: BoundExpr | None = None):
        super().__init__(reason)
        self.reason = reason
        self.subterm = subterm


@dataclass(frozen=True)
class EvalResult:
    value: object | None
    exceeded: bool = False
    reason: str = ""
    subterm: str = ""

    def __str__(self) -> str:
        if self.exceeded:
            return f"exceeds cap ({self.reason}) at {self.subterm}"
        return _value_text(self.value)


def _value_text(v) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(_value_text(x) for x in v) + "]"
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return str(v)


def _short(e: BoundExpr | None, limit: int = 240) -> str:
    if e is None:
        return ""
    s = " ".join(to_text(e).split())
    return s if len(s) <= limit else s[: limit - 3] + "..."


class Evaluator:
    """Evaluates expressions bottom-up, expanding named calls lazily.

    ``definitions`` maps a call name to ``fn(evaluator, *args)`` which returns
    either a value or a new expression to evaluate. Results are memoized on the
    full argument tuple.
    """

    def __init__(
        self,
        definitions: Mapping[str, Callable],
        digit_cap: int = DEFAULT_DIGIT_CAP,
        max_steps: int = DEFAULT_MAX_STEPS,
    ):
        if digit_cap < 1:
            raise DomainError("digit cap must be >= 1")
        self.definitions = dict(definitions)
        self.digit_cap = digit_cap
        self.max_steps = max_steps
        self.steps = 0
        self.memo: dict = {}
        self._cap_bits = int(digit_cap * _LOG2_10) + 2
        self._limit: int | None = None

    # size control

    def _too_big(self, x: int) -> bool:
        bl = abs(x).bit_length()
        if bl < self._cap_bits - 8:
            return False
        if bl > self._cap_bits + 8:
            return True
        if self._limit is None:
            self._limit = 10**self.digit_cap
        return abs(x) >= self._limit

    def check(self, v, where: BoundExpr | None = None):
        if isinstance(v, Fraction):
            if self._too_big(v.numerator) or self._too_big(v.denominator):
                raise CapExceeded(f"more than {self.digit_cap} digits", where)
        elif isinstance(v, int) and self._too_big(v):
            raise CapExceeded(f"more than {self.digit_cap} digits", where)
        return v

    def tick(self, n: int = 1, where: BoundExpr | None = None) -> None:
        self.steps += n
        if self.steps > self.max_steps:
            raise CapExceeded(f"more than {self.max_steps} evaluation steps", where)

    def power(self, a, e, where: BoundExpr | None = None):
        if isinstance(e, Fraction):
            if e.denominator != 1:
                raise DomainError(f"non-integer exponent {e} in {_short(where)}")
            e = e.numerator
        if isinstance(a, Fraction) and a.denominator == 1:
            a = a.numerator
        if e < 0:
            if a == 0:
                raise DomainError(f"zero to a negative power in {_short(where)}")
            return self.power(1 / Fraction(a), -e, where)
        if a in (0, 1) or e in (0, 1):
            return a**e
        if a == -1:
            return (-1) ** e
        num, den = (a.numerator, a.denominator) if isinstance(a, Fraction) else (a, 1)
        size = max(abs(num).bit_length(), den.bit_length()) - 1
        if size * e > self._cap_bits + 8:
            raise CapExceeded(f"power with about {_digits_text(size * e * 1000 // 3322)} digits", where)
        return self.check(a**e, where)

    # evaluation

    def run(self, expr: BoundExpr, env: Mapping | None = None) -> EvalResult:
        try:
            return EvalResult(normalize(self.eval(expr, dict(env or {}))))
        except CapExceeded as exc:
            return EvalResult(None, True, exc.reason, _short(exc.subterm if exc.subterm is not None else expr))

    def eval(self, e: BoundExpr, env: dict):
        self.tick(1, e)
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Var):
            if e.name not in env:
                raise DomainError(f"unbound variable {e.name!r}")
            return env[e.name]
        if isinstance(e, BinOp):
            a = self.eval(e.left, env)
            b = self.eval(e.right, env)
            if e.op == "+":
                return self.check(a + b, e)
            if e.op == "-":
                return self.check(a - b, e)
            if e.op == "*":
                return self.check(a * b, e)
            if e.op == "/":
                if b == 0:
                    raise DomainError(f"division by zero in {_short(e)}")
                return self.check(Fraction(a) / b, e)
            if e.op == "^":
                return self.power(a, b, e)
            raise DomainError(f"unknown operator {e.op!r}")
        if isinstance(e, Ceil):
            v = Fraction(self.eval(e.arg, env))
            return -((-v.numerator) // v.denominator)
        if isinstance(e, ListExpr):
            return tuple(normalize(self.eval(x, env)) for x in e.items)
        if isinstance(e, Let):
            inner = dict(env)
            inner[e.name] = self.eval(e.value, env)
            return self.eval(e.body, inner)
        if isinstance(e, Iter):
            n = normalize(self.eval(e.count, env))
            if not isinstance(n, int) or n < 0:
                raise DomainError(f"iteration count must be a nonnegative integer, got {n}")
            if n > self.max_steps - self.steps:
                raise CapExceeded(f"iteration count {_digits_text(n)} exceeds the step budget", e.count)
            x = self.eval(e.start, env)
            inner = dict(env)
            for _ in range(n):
                inner[e.var] = x
                x = self.eval(e.body, inner)
            return x
        if isinstance(e, Call):
            args = tuple(normalize(self.eval(a, env)) for a in e.args)
            return self.apply(e.name, args, e)
        raise TypeError(f"not an expression: {e!r}")

    def apply(self, name: str, args: tuple, where: BoundExpr | None = None):
        key = (name, args)
        if key in self.memo:
            return self.memo[key]
        fn = self.definitions.get(name)
        if fn is None:
            raise ConfigurationError(f"no definition for {name!r}")
        try:
            out = fn(self, *args)
        except CapExceeded as exc:
            if exc.subterm is None:
                exc.subterm = where
            raise
        if isinstance(out, BoundExpr):
            out = self.eval(out, {})
        out = normalize(out)
        self.memo[key] = out
        return out


def normalize(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    if isinstance(v, bool):
        return int(v)
    return v


def _digits_text(n: int) -> str:
    bl = n.bit_length()
    if bl < 64:
        return str(n)
    return f"10^{(bl - 1) * 30103 // 100000}"
