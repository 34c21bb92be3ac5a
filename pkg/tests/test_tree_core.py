from __future__ import annotations

from fractions import Fraction

import pytest

from hltrees.errors import DomainError
from hltrees.tree_core import (
    HomogeneousTree,
    Incompatible,
    LevelMismatch,
    LevelOutOfBounds,
    NodeNotInTree,
    NoSuccessors,
    VectorTree,
    as_node,
    density,
    fw_measure,
    immediate_successors,
    level,
    node_from_rank,
    node_rank,
    relative_density,
    successors,
)


def test_levels_and_sizes():
    T = HomogeneousTree(2, 3)
    assert list(level(T, 1)) == [(0,), (1,)]
    assert T.size() == 7
    assert T.level_size(2) == 4
    with pytest.raises(LevelOutOfBounds):
        T.level_size(3)


def test_bad_trees():
    with pytest.raises(DomainError):
        HomogeneousTree(1, 3)
    with pytest.raises(DomainError):
        HomogeneousTree(2, 0)
    with pytest.raises(DomainError):
        VectorTree((), 2)


def test_as_node():
    assert as_node("01") == (0, 1)
    assert as_node("") == ()
    with pytest.raises(NodeNotInTree):
        as_node("2", 2)
    with pytest.raises(DomainError):
        as_node("1", 11)


def test_rank_round_trip():
    for b in (2, 3):
        for n in range(4):
            nodes = list(HomogeneousTree(b, 4).level(n))
            assert [node_rank(t, b) for t in nodes] == list(range(b**n))
            assert [node_from_rank(i, n, b) for i in range(b**n)] == nodes


def test_successors():
    T = HomogeneousTree(2, 3)
    assert immediate_successors(T, "0") == [(0, 0), (0, 1)]
    assert successors(T, "0") == [(0,), (0, 0), (0, 1)]
    with pytest.raises(NoSuccessors):
        immediate_successors(T, "00")


def test_density():
    T = HomogeneousTree(2, 3)
    F = ["00", "01", "11"]
    assert density(T, F, 2) == Fraction(3, 4)
    with pytest.raises(LevelMismatch):
        density(T, ["1"], 2)
    assert relative_density(T, F, 2, "0") == 1
    assert relative_density(T, F, 2, "1") == Fraction(1, 2)


def test_vector_tree():
    vt = VectorTree((2, 3), 2)
    assert vt.level_size(1) == 6
    pts = list(vt.level_product(1))
    assert pts[0] == ((0,), (0,)) and pts[-1] == ((1,), (2,))
    assert [vt.point_rank(p) for p in pts] == list(range(6))
    assert [vt.point_from_rank(i, 1) for i in range(6)] == pts
    with pytest.raises(NodeNotInTree):
        vt.point_level(((0,), ()))
    with pytest.raises(Incompatible):
        VectorTree.of([HomogeneousTree(2, 2), HomogeneousTree(2, 3)])


def test_fw_measure():
    vt = VectorTree((2, 2), 2)
    assert fw_measure(vt, vt.points()) == 1
    assert fw_measure(vt, [((), ())]) == Fraction(1, 2)
    assert fw_measure(vt, [((0,), (1,)), ((0,), (1,))]) == Fraction(1, 8)
