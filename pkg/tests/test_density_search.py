from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

import oracles
from hltrees.density_search import (
    DenseSet,
    LevelSelection,
    SearchStats,
    check_pst_bound,
    find_ls_witness,
    find_subtree_in_set,
    glue_sections,
    ls_exact,
    section_reduce,
    signature,
    threshold,
    udhl_exact,
    udhl_exact_for_L,
    weight,
)
from hltrees.errors import BudgetError, DomainError
from hltrees.strong_subtrees import enumerate_strong, validate_vector
from hltrees.tree_core import HomogeneousTree, VectorTree


def _random_set(vt, p, rng):
    return DenseSet.from_points(vt, [x for x in vt.points() if rng.random() < p])


def _least_contained(D, k):
    for s in enumerate_strong(D.ambient, k):
        if all(x in D for x in s.points()):
            return s
    return None


def test_threshold_is_exact_ceiling():
    assert threshold(Fraction(1, 2), 4) == 2
    assert threshold(Fraction(1, 3), 4) == 2
    assert threshold(Fraction(1), 8) == 8


@pytest.mark.parametrize("bs,h,k", [((2,), 3, 2), ((2,), 4, 3), ((3,), 3, 2), ((2, 2), 3, 2), ((2, 3), 2, 2)])
def test_search_matches_naive(bs, h, k):
    rng = random.Random(hash((bs, h, k)) & 0xFFFF)
    vt = VectorTree(bs, h)
    subs = oracles.vector_strong_subtrees(bs, h, k)
    for _ in range(40):
        D = _random_set(vt, rng.choice([0.4, 0.6, 0.8]), rng)
        got = find_subtree_in_set(D, k)
        assert (got is not None) == oracles.contains_subtree(D.points(), subs)
        assert got == _least_contained(D, k)


def test_search_trivial_cases():
    vt = VectorTree((2, 2), 3)
    full = DenseSet.full(vt)
    s = find_subtree_in_set(full, 3)
    assert s is not None and set(s.points()) == set(vt.points())
    assert find_subtree_in_set(DenseSet.from_points(vt, []), 1) is None


def test_search_parallel_matches_serial():
    rng = random.Random(5)
    vt = VectorTree((2, 2), 3)
    for _ in range(5):
        D = _random_set(vt, 0.7, rng)
        a, b = SearchStats(), SearchStats()
        assert find_subtree_in_set(D, 2, stats=a) == find_subtree_in_set(D, 2, jobs=2, stats=b)
        assert a.as_dict() == b.as_dict()


def test_udhl_small_values():
    assert udhl_exact([2], 1, 1, 3).value == 1
    assert udhl_exact([2], 2, 1, 3).value == 2
    assert udhl_exact([2], 1, Fraction(1, 2), 3).value == 1


def test_udhl_matches_naive_window_4():
    eps = Fraction(1, 2)
    res = udhl_exact([2], 2, eps, 4)
    assert res.value == oracles.udhl_value([2], 2, eps, 4)
    ce = res.counterexample.counterexample
    assert oracles.contains_subtree(ce.points(), oracles.vector_strong_subtrees([2], 4, 2)) is False
    assert ce.is_dense(eps)


def test_udhl_for_L_matches_naive_2d():
    eps = Fraction(1, 2)
    for L in [(0,), (1,), (0, 1), (1, 2), (0, 2), (0, 1, 2)]:
        v = udhl_exact_for_L([2, 2], 2, eps, L, 3)
        assert v.holds == oracles.udhl_holds_for_L([2, 2], 2, eps, L, 3)[0]


def test_udhl_budget():
    with pytest.raises(BudgetError):
        udhl_exact([2], 2, Fraction(1, 2), 5, budget=100)


def test_udhl_domain():
    with pytest.raises(DomainError):
        udhl_exact([2], 2, Fraction(1, 2), 0)


def test_signature_and_weight_examples():
    T = HomogeneousTree(2, 3)
    D = [(), (0,), (1,), (0, 0), (1, 1)]
    assert signature(T, D) == {(), (0,), (1,), (2,), (0, 1), (0, 2)}
    assert weight(T, D) == Fraction(5, 2)
    chk = check_pst_bound(T, [(), (0,), (1,)])
    assert chk.signature_size == 4 and chk.weight == 2 and chk.equality


def test_signature_matches_naive():
    rng = random.Random(3)
    for b, h in [(2, 3), (3, 2), (2, 4)]:
        T = HomogeneousTree(b, h)
        nodes = list(T.nodes())
        for _ in range(25):
            D = [t for t in nodes if rng.random() < 0.6]
            assert signature(T, D) == oracles.signature(b, h, D)
            assert weight(T, D) == oracles.weight(b, h, D)


def _dense_2d(rng, eps, h=3, bs=(2, 2)):
    vt = VectorTree(bs, h)
    pts = []
    for n in range(h):
        lv = list(vt.level_product(n))
        pts += rng.sample(lv, threshold(eps, len(lv)))
    return DenseSet.from_points(vt, pts, range(h))


def test_section_reduce_bound():
    rng = random.Random(11)
    eps = Fraction(3, 4)
    for _ in range(20):
        D = _dense_2d(rng, eps)
        C, sel = section_reduce(D, eps)
        for n in D.support_levels:
            assert 2 * len(C.level(n)) >= eps * C.ambient.level_size(n)
            for t in C.level(n):
                assert sel.density_of(t) >= eps / 2


def test_section_reduce_rejects_sparse():
    vt = VectorTree((2, 2), 2)
    D = DenseSet.from_points(vt, [((), ())], [0, 1])
    with pytest.raises(DomainError):
        section_reduce(D, Fraction(1, 2))


def test_glue_sections_certificates_are_valid():
    rng = random.Random(2)
    eps = Fraction(3, 4)
    found = 0
    for _ in range(15):
        D = _dense_2d(rng, eps)
        g = glue_sections(D, eps, 2)
        if g.glued is not None:
            found += 1
            assert validate_vector(D.ambient, g.glued) == (True, None)
            assert all(p in D for p in g.glued.points())
            assert find_subtree_in_set(D, 2) is not None
    assert found


def _random_selection(rng, bs, h, bw, hw, level_set, p):
    vt = VectorTree(bs, h)
    W = HomogeneousTree(bw, hw)
    values = {}
    for x in vt.points():
        n = len(x[0])
        values[x] = [w for w in W.level(level_set[n]) if rng.random() < p]
    return LevelSelection(vt, W, level_set, values)


def test_ls_witness_matches_naive():
    rng = random.Random(9)
    for _ in range(30):
        sel = _random_selection(rng, (2,), 2, 2, 3, (0, 2), 0.6)
        got = find_ls_witness(sel, 2)
        want = oracles.witness_exists(sel, (2,), 2, sel.level_set, 2, 3, 2)
        assert (got is not None) == want
        if got is not None:
            for j, n in enumerate(got.s.level_set):
                for p in got.s.level_product(j):
                    assert set(got.r.nodes_by_level[j]) <= sel(p)


def test_ls_witness_budget():
    sel = _random_selection(random.Random(1), (2,), 3, 2, 3, (0, 1, 2), 1.0)
    with pytest.raises(BudgetError):
        find_ls_witness(sel, 2, budget=1)


def test_restrict_reindexes_levels():
    rng = random.Random(4)
    sel = _random_selection(rng, (2,), 3, 2, 4, (0, 1, 3), 0.7)
    sub = next(s for s in enumerate_strong(sel.ambient, 2) if s.level_set == (0, 2))
    r, iso = sel.restrict(sub)
    assert r.level_set == (0, 3)
    for p in r.ambient.points():
        assert r(p) == sel(iso(p))


def test_ls_small_values():
    assert ls_exact([2, 2], 1, Fraction(1, 2), 3).value == 1
    with pytest.raises(DomainError):
        ls_exact([2], 1, Fraction(1, 2), 3)
