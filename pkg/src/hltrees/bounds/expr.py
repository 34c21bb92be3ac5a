"""Bound expressions: an immutable tree with a text form and a JSON form.

Text grammar (whitespace-insensitive)::

    expr   := 'let' NAME '=' expr ';' expr | sum
    sum    := prod (('+' | '-') prod)*
    prod   := power (('*' | '/') power)*
    power  := atom ('^' power)?
    atom   := INT | INT '/' INT (no spaces: a rational literal) | NAME
            | NAME '(' [expr (',' expr)*] ')' | 'ceil' '(' expr ')'
            | 'iter' '(' NAME '->' expr ',' expr ',' expr ')'
            | '[' [expr (',' expr)*] ']' | '(' expr ')'

``iter(x -> body, n, x0)`` is the ``n``-fold iterate of ``x -> body`` at ``x0``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..errors import DomainError

Value = Union[int, Fraction, tuple]


class BoundExpr:
    __slots__ = ()

    def __add__(self, other):
        return BinOp("+", self, lift(other))

    def __radd__(self, other):
        return BinOp("+", lift(other), self)

    def __sub__(self, other):
        return BinOp("-", self, lift(other))

    def __rsub__(self, other):
        return BinOp("-", lift(other), self)

    def __mul__(self, other):
        return BinOp("*", self, lift(other))

    def __rmul__(self, other):
        return BinOp("*", lift(other), self)

    def __truediv__(self, other):
        return BinOp("/", self, lift(other))

    def __rtruediv__(self, other):
        return BinOp("/", lift(other), self)

    def __pow__(self, other):
        return BinOp("^", self, lift(other))

    def __rpow__(self, other):
        return BinOp("^", lift(other), self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Const(BoundExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, eq=True)
class Var(BoundExpr):
    name: str


@dataclass(frozen=True, eq=True)
class BinOp(BoundExpr):
    op: str
    left: BoundExpr
    right: BoundExpr


@dataclass(frozen=True, eq=True)
class Ceil(BoundExpr):
    arg: BoundExpr


@dataclass(frozen=True, eq=True)
class ListExpr(BoundExpr):
    items: tuple


@dataclass(frozen=True, eq=True)
class Call(BoundExpr):
    name: str
    args: tuple


@dataclass(frozen=True, eq=True)
class Iter(BoundExpr):
    var: str
    body: BoundExpr
    count: BoundExpr
    start: BoundExpr


@dataclass(frozen=True, eq=True)
class Let(BoundExpr):
    name: str
    value: BoundExpr
    body: BoundExpr


def lift(x) -> BoundExpr:
    if isinstance(x, BoundExpr):
        return x
    if isinstance(x, (list, tuple)):
        return ListExpr(tuple(lift(v) for v in x))
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Const(Fraction(x))
    if isinstance(x, str):
        return Const(Fraction(x))
    raise TypeError(f"cannot lift {x!r} into an expression")


def call(name: str, *args) -> Call:
    return Call(name, tuple(lift(a) for a in args))


def let(name: str, value, body_fn) -> Let:
    """``let name = value; body_fn(Var(name))``."""
    return Let(name, lift(value), lift(body_fn(Var(name))))


def iterate(var: str, body_fn, count, start) -> Iter:
    return Iter(var, lift(body_fn(Var(var))), lift(count), lift(start))


# --- text --------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _const_text(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator) if v >= 0 else f"(0 - {-v.numerator})"
    if v < 0:
        return f"(0 - {-v.numerator}/{v.denominator})"
    return f"{v.numerator}/{v.denominator}"


def _text(e: BoundExpr, parent: int = 0, right: bool = False) -> str:
    if isinstance(e, Const):
        s = _const_text(e.value)
        # a rational literal binds like an atom except under ^ on the left
        if "/" in s and not s.startswith("(") and parent >= 3:
            return f"({s})"
        return s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            s = f"{_text(e.left, p + 1)} ^ {_text(e.right, p)}"
        else:
            s = f"{_text(e.left, p)} {e.op} {_text(e.right, p + 1)}"
        return f"({s})" if p < parent else s
    if isinstance(e, Ceil):
        return f"ceil({_text(e.arg)})"
    if isinstance(e, ListExpr):
        return "[" + ", ".join(_text(x) for x in e.items) + "]"
    if isinstance(e, Call):
        return f"{e.name}(" + ", ".join(_text(x) for x in e.args) + ")"
    if isinstance(e, Iter):
        return f"iter({e.var} -> {_text(e.body)}, {_text(e.count)}, {_text(e.start)})"
    if isinstance(e, Let):
        s = f"let {e.name} = {_text(e.value)};\n{_text(e.body)}"
        return f"({s})" if parent else s
    raise TypeError(f"not an expression: {e!r}")


def to_text(e: BoundExpr) -> str:
    return _text(e)


_TOKEN = re.compile(
    r"\s*(?:(?P<rat>\d+/\d+)|(?P<int>\d+)|(?P<arrow>->)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;=\[\]]))"
)


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        k, v = self.toks[self.i]
        if value is not None and v != value:
            raise DomainError(f"expected {value!r}, found {v!r}")
        if kind is not None and k != kind:
            raise DomainError(f"expected {kind}, found {v!r}")
        self.i += 1
        return v

    def expr(self):
        k, v = self.peek()
        if k == "name" and v == "let":
            self.take()
            name = self.take(kind="name")
            self.take("=")
            value = self.expr()
            self.take(";")
            return Let(name, value, self.expr())
        return self.sum()

    def sum(self):
        e = self.prod()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()
            e = BinOp(op, e, self.prod())
        return e

    def prod(self):
        e = self.power()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()
            e = BinOp(op, e, self.power())
        return e

    def power(self):
        e = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return BinOp("^", e, self.power())
        return e

    def args(self, close):
        out = []
        if self.peek()[1] != close:
            out.append(self.expr())
            while self.peek()[1] == ",":
                self.take()
                out.append(self.expr())
        self.take(close)
        return tuple(out)

    def atom(self):
        k, v = self.peek()
        self.take()
        if k == "int":
            return Const(Fraction(int(v)))
        if k == "rat":
            return Const(Fraction(v))
        if v == "(":
            e = self.expr()
            self.take(")")
            return _fold_neg(e)
        if v == "[":
            return ListExpr(self.args("]"))
        if k == "name":
            if v == "ceil":
                self.take("(")
                e = self.expr()
                self.take(")")
                return Ceil(e)
            if v == "iter":
                self.take("(")
                var = self.take(kind="name")
                self.take(kind="arrow")
                body = self.expr()
                self.take(",")
                count = self.expr()
                self.take(",")
                start = self.expr()
                self.take(")")
                return Iter(var, body, count, start)
            if self.peek() == ("op", "("):
                self.take()
                return Call(v, self.args(")"))
            return Var(v)
        raise DomainError(f"unexpected token {v!r}")


def _fold_neg(e: BoundExpr) -> BoundExpr:
    """``(0 - c)`` for a constant ``c`` is how negative constants print; read it back as one."""
    if isinstance(e, BinOp) and e.op == "-" and e.left == Const(0) and isinstance(e.right, Const):
        return Const(-e.right.value)
    return e


def parse(text: str) -> BoundExpr:
    p = _Parser(text)
    e = p.expr()
    if p.peek()[0] != "end":
        raise DomainError(f"trailing input at token {p.peek()[1]!r}")
    return e


# --- JSON --------------------------------------------------------------------


def to_json(e: BoundExpr) -> dict:
    if isinstance(e, Const):
        v = e.value
        return {"op": "const", "value": str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"}
    if isinstance(e, Var):
        return {"op": "var", "name": e.name}
    if isinstance(e, BinOp):
        return {"op": e.op, "args": [to_json(e.left), to_json(e.right)]}
    if isinstance(e, Ceil):
        return {"op": "ceil", "args": [to_json(e.arg)]}
    if isinstance(e, ListExpr):
        return {"op": "list", "args": [to_json(x) for x in e.items]}
    if isinstance(e, Call):
        return {"op": "call", "name": e.name, "args": [to_json(x) for x in e.args]}
    if isinstance(e, Iter):
        return {"op": "iter", "var": e.var, "args": [to_json(e.body), to_json(e.count), to_json(e.start)]}
    if isinstance(e, Let):
        return {"op": "let", "name": e.name, "args": [to_json(e.value), to_json(e.body)]}
    raise TypeError(f"not an expression: {e!r}")


def from_json(d: dict) -> BoundExpr:
    op = d["op"]
    args = [from_json(a) for a in d.get("args", [])]
    if op == "const":
        return Const(Fraction(d["value"]))
    if op == "var":
        return Var(d["name"])
    if op in _PREC:
        return BinOp(op, *args)
    if op == "ceil":
        return Ceil(*args)
    if op == "list":
        return ListExpr(tuple(args))
    if op == "call":
        return Call(d["name"], tuple(args))
    if op == "iter":
        return Iter(d["var"], *args)
    if op == "let":
        return Let(d["name"], *args)
    raise DomainError(f"unknown expression node {op!r}")


def dumps(e: BoundExpr) -> str:
    return json.dumps(to_json(e), sort_keys=True)
