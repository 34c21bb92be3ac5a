"""Numeric scaffolding of the density-increment argument.

Square-root sequences are handled two ways: exact identities are checked on
linear forms (each square is rewritten through its defining relation), and
inequalities are certified with :mod:`hltrees.intervals`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Iterable, Sequence

from .density_search import LevelSelection
from .errors import DomainError, HLTreesError, InvariantViolation
from .intervals import DEFAULT_PRECISION, MAX_PRECISION, Interval, decide_le
from .strong_subtrees import VectorStrongSubtree
from .tree_core import NoSuccessors, as_node

# r = base ** exponent is materialized only below this many bits
MAX_R_BITS = 1 << 20


def _frac(x, name: str) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DomainError(f"{name}: not a rational number: {x!r}") from exc


# --- linear forms ------------------------------------------------------------


class Form(Counter):
    """A linear combination of named symbols with rational coefficients."""

    def __add__(self, other):
        out = Form(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return out.clean()

    def __sub__(self, other):
        return self + Form({k: -v for k, v in other.items()})

    def clean(self) -> "Form":
        for k in [k for k, v in self.items() if v == 0]:
            del self[k]
        return self

    def __eq__(self, other):
        return dict(Form(self).clean()) == dict(Form(other).clean())

    def __hash__(self):
        return hash(frozenset(self.clean().items()))


def sym(name: str, coeff=1) -> Form:
    return Form({name: Fraction(coeff)})


# --- gammas --------------------------------------------------------------------


@dataclass(frozen=True)
class GammaTriple:
    alpha: Fraction
    beta: Fraction
    rho: Fraction
    square0: Fraction  # gamma0 ** 2, exact
    gamma0: Interval
    gamma1: Interval
    gamma2: Interval
    bits: int = DEFAULT_PRECISION

    def identity_forms(self) -> list:
        """The four sides of the defining identity, expanded to linear forms."""
        g0_sq = sym("1", self.square0)
        g1_sq = sym("g0") + g0_sq
        g2_sq = sym("g1") + g1_sq
        a = sym("1", self.alpha)
        return [
            a + g0_sq,
            a - sym("g0") + g1_sq,
            a - sym("g0") - sym("g1") + g2_sq,
            sym("1", self.beta + self.rho**2),
        ]

    def identity_holds(self) -> bool:
        forms = self.identity_forms()
        return all(f == forms[-1] for f in forms)

    def identity_numeric(self) -> bool:
        """The same identity evaluated on the certified intervals."""
        target = self.beta + self.rho**2
        sides = [
            self.alpha + self.gamma0.square(),
            self.alpha - self.gamma0 + self.gamma1.square(),
            self.alpha - self.gamma0 - self.gamma1 + self.gamma2.square(),
        ]
        return all(target in s for s in sides)


def _tower_step(x: Interval, bits: int) -> Interval:
    return (x + x.square()).sqrt(bits)


def gammas(alpha, beta, rho, bits: int = DEFAULT_PRECISION) -> GammaTriple:
    alpha, beta, rho = _frac(alpha, "alpha"), _frac(beta, "beta"), _frac(rho, "rho")
    if not (0 < alpha <= beta <= 1 and 0 < rho <= 1):
        raise DomainError(f"need 0 < alpha <= beta <= 1 and 0 < rho <= 1, got {alpha}, {beta}, {rho}")
    s0 = beta + rho**2 - alpha
    if s0 < 0:
        raise DomainError(f"beta + rho^2 < alpha ({beta} + {rho}^2 < {alpha})")
    g0 = Interval.exact(s0).sqrt(bits)
    g1 = _tower_step(g0, bits)
    g2 = _tower_step(g1, bits)
    return GammaTriple(alpha, beta, rho, s0, g0, g1, g2, bits)


def gamma_bounds_hold(alpha, beta, rho) -> dict:
    """``rho <= gamma0`` and, when ``gamma0 <= 1``, ``gamma1 <= 2 gamma0^(1/2)``, ``gamma2 <= 2 gamma0^(1/4)``."""
    out = {}

    def pair(which):
        def compute(bits):
            t = gammas(alpha, beta, rho, bits)
            if which == "rho":
                return Interval.exact(t.rho), t.gamma0
            root = t.gamma0.sqrt(bits)
            if which == "g1":
                return t.gamma1, 2 * root
            return t.gamma2, 2 * root.sqrt(bits)

        return compute

    s0 = gammas(alpha, beta, rho).square0
    out["rho<=gamma0"] = Fraction(rho) ** 2 <= s0
    if s0 <= 1:
        for name in ("g1", "g2"):
            out[name] = decide_le(pair(name))[0]
    return out


def check_gamma_smallness(gamma0, alpha, q: int, b: int) -> bool:
    """Is ``gamma0 <= (alpha / (4 q b))**4``? Inclusive; decided exactly.

    ``gamma0`` may be a rational, an :class:`Interval`, or a callable mapping a
    precision in bits to an interval (widened until the comparison is decided).
    """
    alpha = _frac(alpha, "alpha")
    if q < 1 or b < 2:
        raise DomainError(f"need q >= 1 and b >= 2, got q={q}, b={b}")
    bound = (alpha / (4 * q * b)) ** 4
    if isinstance(gamma0, (int, Fraction)):
        return Fraction(gamma0) <= bound
    if isinstance(gamma0, Interval):
        v = gamma0.certainly_le(bound)
        if v is None:
            raise HLTreesError(f"interval {gamma0} straddles the bound {bound}")
        return v
    v, bits = decide_le(lambda bits: (gamma0(bits), Interval.exact(bound)))
    if v is None:
        raise HLTreesError(f"comparison undecided at {bits} bits")
    return v


# --- the schedule --------------------------------------------------------------


@dataclass(frozen=True)
class Power:
    """``base ** exponent`` kept unevaluated."""

    base: Fraction
    exponent: int

    @property
    def bits(self) -> int:
        """Rough size of the exact value in bits."""
        return self.exponent * max(self.base.numerator.bit_length(), self.base.denominator.bit_length())

    def value(self) -> Fraction:
        if self.bits > MAX_R_BITS:
            raise HLTreesError(f"{self} is too large to materialize ({self.bits} bits)")
        return self.base**self.exponent

    def root(self, n: int) -> Fraction:
        """``self ** (2 ** -n)``, exact when ``2**n`` divides the exponent."""
        e, rem = divmod(self.exponent, 1 << n)
        if rem:
            raise DomainError(f"2^{n} does not divide the exponent {self.exponent}")
        return Power(self.base, e).value()

    def __str__(self) -> str:
        return f"({self.base})^{self.exponent}"


@dataclass(frozen=True)
class IncrementSchedule:
    b_vec: tuple
    b_last: int
    k: int
    eps: Fraction
    K0: int
    r: Power
    Q0: int
    theta0: Fraction
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_deltas(self) -> int:
        return 3 * self.K0

    @property
    def symbolic(self) -> bool:
        return self.r.bits > MAX_R_BITS

    def deltas(self, bits: int = DEFAULT_PRECISION) -> list:
        """Certified intervals for ``delta_0 .. delta_{3K0-1}``."""
        key = ("deltas", bits)
        if key not in self._cache:
            out = [Interval.exact(self.r.value())]
            for _ in range(self.n_deltas - 1):
                out.append(_tower_step(out[-1], bits))
            self._cache[key] = out
        return self._cache[key]

    def eps_seq(self, bits: int = DEFAULT_PRECISION) -> list:
        d = self.deltas(bits)
        out = [Interval.exact(self.eps)]
        for n in range(self.K0):
            out.append(out[-1] - (d[3 * n] + d[3 * n + 1] + d[3 * n + 2]))
        return out

    # exact bookkeeping on linear forms

    def delta_square_form(self, n: int) -> Form:
        """``delta_n ** 2`` expanded through the defining recursion."""
        f = sym("r^2")
        for i in range(n):
            f = f + sym(f"d{i}")
        return f

    def eps_form(self, n: int) -> Form:
        f = sym("eps")
        for m in range(n):
            f = f - sym(f"d{3 * m}") - sym(f"d{3 * m + 1}") - sym(f"d{3 * m + 2}")
        return f


def q0_value(b_vec: Sequence[int], K0: int) -> int:
    x = prod(b**b for b in b_vec)
    y = prod(b_vec)
    num, den = x**K0 - y**K0, x - y
    if den == 0:
        raise DomainError("branching numbers must be >= 2")
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def build_schedule(
    b_vec: Sequence[int], b_last: int, k: int, eps, udhl_fn: Callable[[tuple, int, Fraction], int]
) -> IncrementSchedule:
    """Iteration count, increment size and negligibility threshold for given parameters.

    ``udhl_fn(b_vec, 2, eta)`` supplies the uniform-density numbers used for the
    iteration count.
    """
    eps = _frac(eps, "eps")
    b_vec = tuple(int(b) for b in b_vec)
    if not b_vec or any(b < 2 for b in b_vec) or b_last < 2:
        raise DomainError("branching numbers must be >= 2")
    if not 0 < eps <= 1:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    if k < 1:
        raise DomainError("k must be >= 1")
    K0 = int(udhl_fn(b_vec, 2, eps / (4 * b_last)))
    if K0 < 1:
        raise DomainError(f"iteration count must be >= 1, got {K0}")
    P = prod(b_vec)
    r = Power(eps / (16 * P**K0 * b_last), 1 << (3 * K0 - 1))
    Q0 = q0_value(b_vec, K0)
    return IncrementSchedule(b_vec, b_last, k, eps, K0, r, Q0, eps / (8 * Q0))


@dataclass(frozen=True)
class PropertyVerdict:
    name: str
    status: str  # PASS, FAIL or UNDECIDED
    detail: str = ""
    bits: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def _verdict(name: str, checks: Iterable, detail: str = "") -> PropertyVerdict:
    """Combine per-instance ``(verdict, bits, label)`` triples."""
    top = 0
    for v, bits, label in checks:
        top = max(top, bits)
        if v is False:
            return PropertyVerdict(name, "FAIL", label, top)
        if v is None:
            return PropertyVerdict(name, "UNDECIDED", label, top)
    return PropertyVerdict(name, "PASS", detail, top)


def check_properties(sched: IncrementSchedule, b_vec=None, b_last=None, eps=None) -> list:
    """P1..P6 for a schedule. P2 and P4 are checked as exact identities."""
    b_vec = tuple(b_vec) if b_vec is not None else sched.b_vec
    b_last = b_last if b_last is not None else sched.b_last
    eps = _frac(eps, "eps") if eps is not None else sched.eps
    K0, N = sched.K0, sched.n_deltas
    P = prod(b_vec)
    out = []

    # P2: sum_{i<=n} delta_i = delta_{n+1}^2 - r^2
    ok = all(
        sum((sym(f"d{i}") for i in range(n + 1)), Form()) == sched.delta_square_form(n + 1) - sym("r^2")
        for n in range(N - 1)
    )
    p2 = PropertyVerdict("P2", "PASS" if ok else "FAIL", "exact identity")
    # P4: eps_{n+1} = eps - sum_{i<=3n+2} delta_i
    ok = all(
        sched.eps_form(n + 1) == sym("eps") - sum((sym(f"d{i}") for i in range(3 * n + 3)), Form())
        for n in range(K0)
    )
    p4 = PropertyVerdict("P4", "PASS" if ok else "FAIL", "exact identity")

    if sched.symbolic:
        why = f"r = {sched.r} is not materialized"
        return [
            PropertyVerdict("P1", "UNDECIDED", why),
            p2,
            PropertyVerdict("P3", "UNDECIDED", why),
            p4,
            PropertyVerdict("P5", "UNDECIDED", why),
            PropertyVerdict("P6", "UNDECIDED", why),
        ]

    def widen(pair_fn):
        return decide_le(pair_fn, MAX_PRECISION)

    # P1: delta_n <= 2 r^(2^-n)
    out.append(
        _verdict(
            "P1",
            (
                widen(lambda bits, n=n: (sched.deltas(bits)[n], Interval.exact(2 * sched.r.root(n)))) + (f"n={n}",)
                for n in range(N)
            ),
        )
    )
    out.append(p2)
    # P3: sum delta_n <= eps/2
    out.append(
        _verdict(
            "P3",
            [widen(lambda bits: (sum(sched.deltas(bits), Interval.exact(0)), Interval.exact(eps / 2))) + ("sum",)],
        )
    )
    out.append(p4)
    # P5: eps/2 <= eps_n <= eps
    checks = []
    for n in range(K0 + 1):
        checks.append(widen(lambda bits, n=n: (Interval.exact(eps / 2), sched.eps_seq(bits)[n])) + (f"lower n={n}",))
        checks.append(widen(lambda bits, n=n: (sched.eps_seq(bits)[n], Interval.exact(eps))) + (f"upper n={n}",))
    out.append(_verdict("P5", checks))
    # P6: delta_{3n} <= delta_{3K0-3} <= gate(K0) <= gate(n+1)
    gate = lambda m: ((eps / 2) / (4 * P**m * b_last)) ** 4  # noqa: E731
    checks = []
    last = 3 * K0 - 3
    for n in range(K0):
        if 3 * n == last:
            checks.append((True, 0, f"monotone n={n}"))
        else:
            checks.append(
                widen(lambda bits, n=n: (sched.deltas(bits)[3 * n], sched.deltas(bits)[last])) + (f"monotone n={n}",)
            )
        checks.append((gate(K0) <= gate(n + 1), 0, f"gate n={n}"))
    checks.append(widen(lambda bits: (sched.deltas(bits)[last], Interval.exact(gate(K0)))) + ("top",))
    # the same chain through the smallness gate
    for n in range(K0):
        v = check_gamma_smallness(lambda bits, n=n: sched.deltas(bits)[3 * n], eps / 2, P ** (n + 1), b_last)
        checks.append((v, 0, f"smallness gate n={n}"))
    out.append(_verdict("P6", checks))
    return out


def delta_monotone(sched: IncrementSchedule, bits: int = DEFAULT_PRECISION) -> bool:
    """``delta_n < delta_{n+1}`` for a tower started below 1."""
    d = sched.deltas(bits)
    return all(a.certainly_le(b) for a, b in zip(d, d[1:]))


# --- Markov-type counting facts ------------------------------------------------


def _check_values(values) -> list:
    vals = [_frac(v, "value") for v in values]
    if not vals:
        raise DomainError("need at least one value")
    for v in vals:
        if not 0 <= v <= 1:
            raise DomainError(f"value {v} outside [0, 1]")
    return vals


def markov_lower(values, eps, eps_prime) -> int:
    """``|{i : a_i >= eps'}|``, asserted to be at least ``(eps - eps') N``."""
    vals = _check_values(values)
    eps, eps_prime = _frac(eps, "eps"), _frac(eps_prime, "eps_prime")
    if not 0 < eps_prime < eps <= 1:
        raise DomainError(f"need 0 < eps' < eps <= 1, got eps={eps}, eps'={eps_prime}")
    N = len(vals)
    if sum(vals) < eps * N:
        raise DomainError(f"mean {sum(vals) / N} is below eps = {eps}")
    count = sum(1 for a in vals if a >= eps_prime)
    if count < (eps - eps_prime) * N:
        raise InvariantViolation(f"count {count} < ({eps} - {eps_prime}) * {N}")
    return count


def markov_concentration(values, eps, delta) -> int:
    """``|{i : a_i >= eps - delta}|``, asserted to be at least ``(1 - delta) N``."""
    vals = _check_values(values)
    eps, delta = _frac(eps, "eps"), _frac(delta, "delta")
    if not 0 < eps <= 1:
        raise DomainError(f"need 0 < eps <= 1, got {eps}")
    if delta <= 0:
        raise DomainError(f"need delta > 0, got {delta}")
    N = len(vals)
    if sum(vals) < eps * N:
        raise DomainError(f"mean {sum(vals) / N} is below eps = {eps}")
    upper = sum(1 for a in vals if a >= eps + delta**2)
    if upper > delta**3 * N:
        raise DomainError(f"{upper} values reach eps + delta^2, more than delta^3 N = {delta**3 * N}")
    count = sum(1 for a in vals if a >= eps - delta)
    if count < (1 - delta) * N:
        raise InvariantViolation(f"count {count} < (1 - {delta}) * {N}")
    return count


# --- dense and strongly dense selections ---------------------------------------


def _relative(sel: LevelSelection, point, w) -> Fraction:
    sec = sel(point)
    n = len(point[0])
    lvl = sel.level_set[n]
    W = sel.target
    gap = lvl - len(w)
    hits = sum(1 for x in sec if x[: len(w)] == w)
    return Fraction(hits, W.branching**gap)


def dense_violation(sel: LevelSelection, w, s: VectorStrongSubtree, eps):
    """First point of ``s``'s level product whose section is too thin below ``w``.

    Returns ``None`` when the selection is dense; ``"level"`` when ``w`` sits
    below the lowest selected level.
    """
    eps = _frac(eps, "eps")
    w = as_node(w)
    sel.target.check_node(w)
    if len(w) > sel.level_set[s.level_set[0]]:
        return "level"
    for p in s.points():
        if _relative(sel, p, w) < eps:
            return p
    return None


def is_dense(sel: LevelSelection, w, s: VectorStrongSubtree, eps) -> bool:
    return dense_violation(sel, w, s, eps) is None


def is_strongly_dense(sel: LevelSelection, w, s: VectorStrongSubtree, eps) -> bool:
    w = as_node(w)
    W = sel.target
    W.check_node(w)
    if W.is_maximal(w):
        raise NoSuccessors(f"node {w!r} is maximal in the target tree")
    return all(is_dense(sel, c, s, eps) for c in W.immediate_successors(w))
