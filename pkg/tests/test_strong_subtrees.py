from __future__ import annotations

import itertools
from collections import Counter

import pytest

import oracles
from hltrees.errors import DomainError
from hltrees.strong_subtrees import (
    StrongSubtree,
    VectorStrongSubtree,
    canonical_isomorphism,
    count_for_level_set,
    count_strong,
    enumerate_strong,
    enumerate_strong2_at,
    enumerate_strong_rooted,
    find_monochromatic,
    is_subtree_of,
    q_formula,
    strong_subtrees_of,
    validate,
)
from hltrees.tree_core import HomogeneousTree, VectorTree


def _node_sets(vt, k):
    return [frozenset(s.components[0].nodes()) for s in enumerate_strong(vt, k)]


@pytest.mark.parametrize("b,h,k", [(2, 3, 1), (2, 3, 2), (2, 3, 3), (3, 3, 2), (2, 4, 2), (2, 4, 3)])
def test_enumeration_matches_brute_force(b, h, k):
    ours = _node_sets(VectorTree((b,), h), k)
    assert len(ours) == len(set(ours))
    assert set(ours) == set(oracles.strong_subtrees(b, h, k))
    assert count_strong(VectorTree((b,), h), k) == len(ours)


def test_known_counts():
    assert count_strong(VectorTree((2,), 3), 2) == 7
    assert count_strong(VectorTree((2,), 2), 2) == 1
    assert count_strong(VectorTree((2,), 2), 1) == 3


def test_vector_enumeration_matches_brute_force():
    vt = VectorTree((2, 2), 3)
    ours = {frozenset(s.points()) for s in enumerate_strong(vt, 2)}
    assert ours == {pts for _, pts in oracles.vector_strong_subtrees((2, 2), 3, 2)}


def test_canonical_order():
    subs = list(enumerate_strong(VectorTree((2, 2), 3), 2))
    assert subs == sorted(subs)


@pytest.mark.parametrize("b_vec,m,h", [((2,), 0, 2), ((2,), 1, 3), ((3,), 0, 2), ((2, 2), 0, 2), ((2, 2), 1, 3), ((2, 3), 1, 3)])
def test_q_formula(b_vec, m, h):
    vt = VectorTree(b_vec, h)
    assert sum(1 for _ in enumerate_strong2_at(vt, m)) == q_formula(b_vec, m)
    want = sum(
        1 for ls, _ in oracles.vector_strong_subtrees(b_vec, h, 2) if ls[1] == m + 1
    )
    assert q_formula(b_vec, m) == want


def test_q_formula_domain():
    with pytest.raises(DomainError):
        q_formula([1], 0)
    with pytest.raises(DomainError):
        q_formula([2], -1)
    assert q_formula([2], 1) == 6


def test_count_for_level_set():
    assert count_for_level_set([2], (0, 2)) == 4
    assert count_for_level_set([2, 2], (0, 2)) == 16


def test_validate_clauses():
    T = HomogeneousTree(2, 3)
    good = StrongSubtree(2, 3, (0, 2), (((),), ((0, 1), (1, 0))))
    assert validate(T, good) == (True, None)
    # two nodes above the same direction
    bad_c = StrongSubtree(2, 3, (0, 2), (((),), ((0, 0), (0, 1))))
    assert validate(T, bad_c) == (False, "c")
    bad_a = StrongSubtree(2, 3, (1, 2), (((0,), (1,)), ((0, 0), (0, 1), (1, 0), (1, 1))))
    assert validate(T, bad_a) == (False, "a")
    assert validate(HomogeneousTree(2, 4), good) == (False, "ambient")


def test_rooted_enumeration():
    vt = VectorTree((2,), 3)
    rooted = list(enumerate_strong_rooted(vt, 2))
    assert all(s.root == ((),) for s in rooted)
    assert len(rooted) == 5


def test_subtrees_of_a_subtree():
    vt = VectorTree((2,), 4)
    big = next(s for s in enumerate_strong(vt, 3) if s.level_set == (0, 2, 3))
    inside = list(strong_subtrees_of(big, 2))
    assert len(inside) == count_strong(VectorTree((2,), 3), 2)
    assert all(is_subtree_of(s, big) for s in inside)
    others = [s for s in enumerate_strong(vt, 2) if s not in inside]
    assert not any(is_subtree_of(s, big) for s in others)


def test_canonical_isomorphism():
    full = StrongSubtree.full(2, 2)
    sub = StrongSubtree(2, 3, (0, 2), (((),), ((0, 1), (1, 0))))
    iso = canonical_isomorphism(full, sub)
    assert iso(()) == ()
    assert iso((0,)) == (0, 1)
    assert iso((1,)) == (1, 0)
    assert iso.inverse()((1, 0)) == (1,)


def test_find_monochromatic():
    vt = VectorTree((2,), 3)
    res = find_monochromatic(vt, 2, 1, lambda s: 0)
    assert res == next(enumerate_strong(vt, 2))
    # colour nodes by level parity: a height-2 subtree on levels (0, 2) is monochromatic
    res = find_monochromatic(vt, 2, 1, lambda s: s.level_set[0] % 2)
    assert res is not None and res.level_set == (0, 2)
    # colour nodes by their last digit (root apart): every height-2 subtree sees two colours
    assert find_monochromatic(vt, 2, 1, lambda s: (s.root[0][-1:] or (2,))[0]) is None
