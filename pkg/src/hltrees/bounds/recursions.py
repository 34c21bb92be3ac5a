"""Upper-bound recursions for Milliken, level-selection and uniform-density numbers.

Every builder returns a :class:`BoundExpr` whose named calls (``mil``,
``milphi``, ``phi``, ``psi``, ``ls``, ``udhl``, ``udhl_base``, ...) are expanded
lazily by :func:`evaluate`. Two constructions of the Milliken bound exist:

* ``mil``: the iteration ``g^(M1)(k)`` with ``M1 = mil(b, m, 1, r)`` and
  ``g(n) = mil(b repeated, n, k, r^(P^(M1 - 2))) + 1``;
* ``milphi``: the function ``phi_k(B, m, r)`` with ``B = prod b_i^b_i``, built
  from ``phi_1`` through ``zeta``, ``omega``, ``f`` and ``psi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Callable, Sequence

from ..errors import ConfigurationError, DomainError, InvariantViolation
from .evaluate import DEFAULT_DIGIT_CAP, DEFAULT_MAX_STEPS, CapExceeded, EvalResult, Evaluator
from .expr import BoundExpr, Call, Ceil, call, iterate, let, lift

# --- phi_1 providers ----------------------------------------------------------


@dataclass
class Phi1Provider:
    """A pluggable ``phi_1(b, m, r)``.

    Calls are logged and checked for monotonicity against every earlier call
    whose arguments are coordinatewise comparable.
    """

    name: str
    fn: Callable | None = None
    history: dict = field(default_factory=dict, repr=False)
    max_history: int = 4096

    @property
    def numeric(self) -> bool:
        return self.fn is not None

    def __call__(self, b: int, m: int, r: int) -> int:
        if self.fn is None:
            raise ConfigurationError(f"phi_1 provider {self.name!r} does not support numeric evaluation")
        key = (b, m, r)
        if key in self.history:
            return self.history[key]
        v = self.fn(b, m, r)
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise InvariantViolation(f"phi_1{key} = {v!r} is not a nonnegative integer")
        for other, w in self.history.items():
            if all(x <= y for x, y in zip(other, key)) and w > v:
                raise InvariantViolation(f"phi_1 is not monotone: phi_1{other} = {w} > phi_1{key} = {v}")
            if all(y <= x for x, y in zip(other, key)) and v > w:
                raise InvariantViolation(f"phi_1 is not monotone: phi_1{key} = {v} > phi_1{other} = {w}")
        if len(self.history) < self.max_history:
            self.history[key] = v
        return v


def no_phi1() -> Phi1Provider:
    return Phi1Provider("none")


def constant_phi1(c: int) -> Phi1Provider:
    if c < 0:
        raise DomainError("constant must be nonnegative")
    return Phi1Provider(f"const({c})", lambda b, m, r: c)


def function_phi1(fn: Callable, name: str = "custom") -> Phi1Provider:
    return Phi1Provider(name, fn)


# --- helpers --------------------------------------------------------------------


def _check_b(b_vec) -> tuple:
    b_vec = tuple(int(b) for b in b_vec)
    if not b_vec:
        raise DomainError("need at least one branching number")
    if any(b < 2 for b in b_vec):
        raise DomainError(f"branching numbers must be >= 2, got {list(b_vec)}")
    return b_vec


def repeated(b_vec: Sequence[int]) -> tuple:
    """Each ``b_i`` repeated ``b_i`` times."""
    return tuple(b for b in b_vec for _ in range(b))


def big_b(b_vec: Sequence[int]) -> int:
    return prod(b**b for b in b_vec)


def _frac(x, name: str) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DomainError(f"{name}: not a rational number: {x!r}") from exc


def _eps(eps) -> Fraction:
    eps = _frac(eps, "eps")
    if not 0 < eps <= 1:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    return eps


# --- udhl_base --------------------------------------------------------------------


def _small_sets(N: int, k: int) -> int:
    return sum(comb(N, i) for i in range(k))


def udhl_base_holds(b: int, k: int, eps, N: int, digit_cap: int | None = None) -> bool:
    """``(b/(b-1))^(eps N) > sum_{i<k} C(N, i)``, decided as ``b^(pN) > M^q (b-1)^(pN)`` with ``eps = p/q``."""
    eps = Fraction(eps)
    p, q = eps.numerator, eps.denominator
    M = _small_sets(N, k)
    if digit_cap is not None:
        # b^(pN) has about pN log10(b) digits
        if p * N * (b.bit_length() - 1) > digit_cap * 3.33 + 8:
            raise CapExceeded(f"deciding udhl_base at N={N} needs more than {digit_cap} digits")
    return b ** (p * N) > M**q * (b - 1) ** (p * N)


def udhl_base(b: int, k: int, eps, digit_cap: int | None = None) -> int:
    """Least ``N`` with ``(b/(b-1))^(eps N) > sum_{i<k} C(N, i)``.

    The search doubles ``N`` until the inequality holds and then bisects; the
    left side over the right side is log-convex in ``N`` and equal to 1 at
    ``N = 0``, so once the inequality holds it keeps holding.
    """
    if b < 2 or k < 1:
        raise DomainError(f"need b >= 2 and k >= 1, got b={b}, k={k}")
    eps = _eps(eps)
    hi = 1
    while not udhl_base_holds(b, k, eps, hi, digit_cap):
        hi *= 2
    lo = hi // 2  # fails (or is 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if udhl_base_holds(b, k, eps, mid, digit_cap):
            hi = mid
        else:
            lo = mid
    return hi


def udhl_base_scan(b: int, k: int, eps, limit: int = 10**5) -> int:
    """Reference linear scan for :func:`udhl_base`."""
    eps = _eps(eps)
    for N in range(1, limit + 1):
        if udhl_base_holds(b, k, eps, N):
            return N
    raise DomainError(f"no N <= {limit}")


# --- definitions used by the evaluator ------------------------------------------


def _mil_args(b_vec, m, k, r):
    b_vec = _check_b(b_vec)
    if not isinstance(m, int) or not isinstance(k, int) or not isinstance(r, int):
        raise DomainError(f"mil arguments must be integers, got m={m}, k={k}, r={r}")
    if r <= 0:
        raise DomainError(f"number of colors must be >= 1, got {r}")
    if k < 1 or m < k:
        raise DomainError(f"need m >= k >= 1, got m={m}, k={k}")
    return b_vec, m, k, r


def def_mil(ev, b_vec, m, k, r):
    b_vec, m, k, r = _mil_args(b_vec, m, k, r)
    if r == 1:
        return m
    if k == 1:
        return call("phi", 1, big_b(b_vec), m, r)
    P = prod(b_vec)
    return let(
        "M1",
        call("atleast2", call("mil", list(b_vec), m, 1, r)),
        lambda M1: iterate(
            "n",
            lambda n: call("mil", list(repeated(b_vec)), n, k - 1, lift(r) ** (lift(P) ** (M1 - 2))) + 1,
            M1,
            k - 1,
        ),
    )


def def_milphi(ev, b_vec, m, k, r):
    b_vec, m, k, r = _mil_args(b_vec, m, k, r)
    if r == 1:
        return m
    return call("phi", k, big_b(b_vec), m, r)


def def_phi(ev, k, b, m, r):
    if k < 1:
        raise DomainError(f"phi index must be >= 1, got {k}")
    if k == 1:
        return ev.phi1(b, m, r)
    # phi_{k}(b, m, r) = psi_{k-1}(zeta(b, m, r), b, k - 1, r)
    return call("psi", k - 1, call("zeta", b, m, r), b, k - 1, r)


def def_zeta(ev, b, m, r):
    return call("phi", 1, b, m, r)


def def_omega(ev, b, m, r):
    return lift(r) ** (lift(b) ** call("zeta", b, m, r))


def def_f(ev, k, b, m, r):
    return call("phi", k, b, m, call("omega", b, m, r)) + 1


def def_psi(ev, k, i, b, m, r):
    """``psi(0) = m``, ``psi(i + 1) = f_k(b, psi(i), r)``."""
    if i < 0:
        raise DomainError("psi index must be >= 0")
    return iterate("x", lambda x: call("f", k, b, x, r), i, m)


def def_atleast2(ev, x):
    if x < 2:
        raise DomainError(f"M1 = {x} < 2 leaves the exponent M1 - 2 undefined")
    return x


def def_mil_repeated(ev, b_vec, m, k, r):
    return call("mil", list(repeated(_check_b(b_vec))), m, k, r) + 1


def def_udhl_base(ev, b, k, eps):
    return udhl_base(b, k, eps, ev.digit_cap)


def def_udhl(ev, b_vec, k, eps):
    b_vec = _check_b(b_vec)
    eps = _eps(eps)
    if k < 1:
        raise DomainError("k must be >= 1")
    if len(b_vec) == 1:
        return call("udhl_base", b_vec[0], k, eps)
    half = eps / 2
    return call("udhl", list(b_vec[:-1]), call("ls", list(b_vec), k, half), half)


def def_ls(ev, b_plus, k, eps):
    b_plus = _check_b(b_plus)
    if len(b_plus) < 2:
        raise DomainError("ls needs at least two branching numbers")
    eps = _eps(eps)
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return 1
    return ls_step(b_plus, k - 1, eps)


def ls_step(b_plus: Sequence[int], k: int, eps: Fraction) -> BoundExpr:
    """The bound for ``ls(b_plus, k + 1, eps)`` from height-``k`` data."""
    b_vec, b_last = tuple(b_plus[:-1]), b_plus[-1]
    P = prod(b_vec)
    X, Y = big_b(b_vec), P
    bl = list(b_vec)
    return let(
        "K0",
        call("udhl", bl, 2, eps / (4 * b_last)),
        lambda K0: let(
            "r",
            (lift(eps) / (16 * lift(P) ** K0 * b_last)) ** (lift(2) ** (3 * K0 - 1)),
            lambda r: let(
                "Q0",
                (lift(X) ** K0 - lift(Y) ** K0) / (X - Y),
                lambda Q0: let(
                    "theta0",
                    lift(eps) / (8 * Q0),
                    lambda theta0: let(
                        "K1",
                        K0 * Ceil(lift(2 / r**2)),
                        lambda K1: iterate(
                            "n",
                            lambda n: _f1(bl, r, _f2(bl, k, b_last, K0, _f3(list(b_plus), bl, k, theta0, Q0, n))) + 1,
                            K1,
                            k + 1,
                        ),
                    ),
                ),
            ),
        ),
    )


def _f1(bl, r, n):
    return Ceil(lift(1 / r**3)) * call("udhl", bl, n, r**3)


def _f2(bl, k, b_last, K0, n):
    return call("mil", list(repeated(bl)), n, k, lift(b_last) ** (lift(prod(bl)) ** (K0 - 1)))


def _f3(b_plus, bl, k, theta0, Q0, n):
    return call("mil", bl, call("ls", b_plus, k, theta0), 1, Q0) + n - 1


DEFINITIONS = {
    "mil": def_mil,
    "milphi": def_milphi,
    "phi": def_phi,
    "zeta": def_zeta,
    "omega": def_omega,
    "f": def_f,
    "psi": def_psi,
    "atleast2": def_atleast2,
    "mil_repeated": def_mil_repeated,
    "udhl_base": def_udhl_base,
    "udhl": def_udhl,
    "ls": def_ls,
}


# --- public builders --------------------------------------------------------------


def mil_bound(b_vec, m: int, k: int, r, phi1: Phi1Provider | None = None, form: str = "g") -> BoundExpr:
    """Upper bound for the Milliken number; ``form`` is ``"g"`` or ``"phi"``."""
    _mil_args(b_vec, m, k, r if isinstance(r, int) else 2)
    if form not in ("g", "phi"):
        raise DomainError(f"unknown construction {form!r}")
    if r == 1:
        return lift(m)
    return call("mil" if form == "g" else "milphi", list(b_vec), m, k, r)


def mil_repeated(b_vec, m: int, k: int, r, phi1: Phi1Provider | None = None) -> BoundExpr:
    _mil_args(b_vec, m, k, r if isinstance(r, int) else 2)
    return call("mil_repeated", list(b_vec), m, k, r)


def ls_bound(b_vec_plus, k: int, eps, phi1: Phi1Provider | None = None) -> BoundExpr:
    b_plus = _check_b(b_vec_plus)
    if len(b_plus) < 2:
        raise DomainError("ls needs at least two branching numbers")
    eps = _eps(eps)
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return lift(1)
    return ls_step(b_plus, k - 1, eps)


def udhl_bound(b_vec, k: int, eps, phi1: Phi1Provider | None = None) -> BoundExpr:
    b_vec = _check_b(b_vec)
    eps = _eps(eps)
    if k < 1:
        raise DomainError("k must be >= 1")
    if len(b_vec) == 1:
        return call("udhl_base", b_vec[0], k, eps)
    half = eps / 2
    return call("udhl", list(b_vec[:-1]), call("ls", list(b_vec), k, half), half)


def psi_expr(k: int, i, b, m, r) -> Call:
    return call("psi", k, i, b, m, r)


class BoundEvaluator(Evaluator):
    def __init__(self, phi1: Phi1Provider | None = None, digit_cap: int = DEFAULT_DIGIT_CAP, max_steps: int = DEFAULT_MAX_STEPS):
        super().__init__(DEFINITIONS, digit_cap, max_steps)
        self.phi1 = phi1 if phi1 is not None else no_phi1()


def evaluate(
    expr: BoundExpr,
    digit_cap: int = DEFAULT_DIGIT_CAP,
    phi1: Phi1Provider | None = None,
    max_steps: int = DEFAULT_MAX_STEPS,
    env: dict | None = None,
) -> EvalResult:
    """Exact value, or a result flagged ``exceeded`` naming the offending subterm."""
    return BoundEvaluator(phi1, digit_cap, max_steps).run(lift(expr), env)
