from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hltrees.density_search import LevelSelection
from hltrees.errors import DomainError, HLTreesError
from hltrees.increment import (
    Form,
    Power,
    build_schedule,
    check_gamma_smallness,
    check_properties,
    delta_monotone,
    dense_violation,
    gamma_bounds_hold,
    gammas,
    is_dense,
    is_strongly_dense,
    markov_concentration,
    markov_lower,
    q0_value,
    sym,
)
from hltrees.intervals import Interval
from hltrees.strong_subtrees import enumerate_strong
from hltrees.tree_core import HomogeneousTree, NoSuccessors, VectorTree


def test_forms():
    assert sym("a") + sym("b") - sym("a") == sym("b")
    assert sym("a", 0) == Form()


def test_gammas_unit_case():
    t = gammas(1, 1, 1)
    assert t.square0 == 1 and t.gamma0 == Interval.exact(1)
    assert Fraction(141421356, 10**8) < t.gamma1.lo <= t.gamma1.hi < Fraction(141421357, 10**8)
    assert Fraction(184775906, 10**8) < t.gamma2.lo <= t.gamma2.hi < Fraction(184775907, 10**8)
    assert t.identity_holds() and t.identity_numeric()


@pytest.mark.parametrize("args", [(0, 1, 1), (1, Fraction(1, 2), 1), (1, 1, 0), (Fraction(1, 2), 1, 2)])
def test_gammas_domain(args):
    with pytest.raises(DomainError):
        gammas(*args)


def test_gamma_bounds():
    out = gamma_bounds_hold(Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    assert all(out.values())


def test_gamma_smallness():
    assert check_gamma_smallness(Fraction(1, 10**9), Fraction(1, 2), 1, 2)
    assert not check_gamma_smallness(Fraction(1, 10), Fraction(1, 2), 1, 2)
    assert check_gamma_smallness(Interval(0, Fraction(1, 10**9)), Fraction(1, 2), 1, 2)
    assert check_gamma_smallness(lambda bits: Interval.exact(2).sqrt(bits) * Fraction(1, 10**9), Fraction(1, 2), 1, 2)
    with pytest.raises(HLTreesError):
        check_gamma_smallness(Interval(0, 1), Fraction(1, 2), 1, 2)


def test_power():
    p = Power(Fraction(1, 4), 8)
    assert p.value() == Fraction(1, 4**8)
    assert p.root(3) == Fraction(1, 4)
    with pytest.raises(DomainError):
        p.root(4)


def test_q0():
    assert q0_value([2], 1) == 1
    assert q0_value([2], 2) == 6
    assert q0_value([2, 2], 2) == 20


@pytest.mark.parametrize("K0", [1, 2, 3])
def test_schedule_properties_pass(K0):
    s = build_schedule([2], 2, 2, Fraction(1, 2), lambda b, k, e: K0)
    verdicts = check_properties(s)
    assert [v.name for v in verdicts] == ["P1", "P2", "P3", "P4", "P5", "P6"]
    assert all(v.status == "PASS" for v in verdicts), verdicts
    assert delta_monotone(s)


def test_schedule_values_k0_2():
    s = build_schedule([2], 2, 2, Fraction(1, 2), lambda b, k, e: 2)
    assert s.r == Power(Fraction(1, 256), 32)
    assert s.Q0 == 6 and s.theta0 == Fraction(1, 96)
    eps = s.eps_seq()
    assert eps[0] == Interval.exact(Fraction(1, 2)) and len(eps) == 3


def test_symbolic_schedule():
    s = build_schedule([2], 2, 2, Fraction(1, 2), lambda b, k, e: 9)
    assert s.symbolic
    statuses = {v.name: v.status for v in check_properties(s)}
    assert statuses["P2"] == statuses["P4"] == "PASS"
    assert statuses["P1"] == "UNDECIDED"


def test_schedule_domain():
    with pytest.raises(DomainError):
        build_schedule([2], 2, 2, Fraction(3, 2), lambda b, k, e: 1)
    with pytest.raises(DomainError):
        build_schedule([2], 2, 2, Fraction(1, 2), lambda b, k, e: 0)


def test_markov_lower():
    assert markov_lower([1, 0, 1, 0], Fraction(1, 2), Fraction(1, 4)) == 2
    with pytest.raises(DomainError):
        markov_lower([0, 0], Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(DomainError):
        markov_lower([1, 1], Fraction(1, 2), Fraction(1, 2))


def test_markov_concentration():
    assert markov_concentration([Fraction(1, 2)] * 4, Fraction(1, 2), Fraction(1, 2)) == 4
    with pytest.raises(DomainError):
        markov_concentration([1, 0], Fraction(1, 2), Fraction(1, 10))
    with pytest.raises(DomainError):
        markov_concentration([1], Fraction(1, 2), 0)



def test_dense_predicates():
    vt = VectorTree((2,), 2)
    W = HomogeneousTree(2, 3)
    sel = LevelSelection(vt, W, (1, 2), {((),): [(0,), (1,)], ((0,),): [(0, 0), (0, 1), (1, 1)], ((1,),): [(0, 0), (1, 1)]})
    S = next(enumerate_strong(vt, 2))
    assert dense_violation(sel, (), S, Fraction(1, 2)) is None
    assert dense_violation(sel, (0,), S, Fraction(1, 2)) is None
    assert dense_violation(sel, (1,), S, Fraction(1, 2)) is None
    assert dense_violation(sel, (1,), S, Fraction(3, 4)) == ((0,),)
    assert is_strongly_dense(sel, (), S, Fraction(1, 2))
    assert not is_dense(sel, (0,), S, 1)
    assert dense_violation(sel, (0, 0), S, Fraction(1, 2)) == "level"
    with pytest.raises(NoSuccessors):
        is_strongly_dense(sel, (0, 0), S, Fraction(1, 2))
