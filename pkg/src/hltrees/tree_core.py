"""Finite homogeneous trees ``b^{<h}``, vector trees and level products.

Nodes are tuples of digits. A node of ``b^{<h}`` at level ``n`` is a tuple of
length ``n`` with entries in ``range(b)``; tuple comparison of equal-length
nodes is the lexicographic order used for every enumeration in the package.
Levels are never materialized unless a caller iterates over them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Iterator, Sequence, Union

from .errors import DomainError

Node = tuple  # tuple[int, ...]
Point = tuple  # tuple[Node, ...], one node per coordinate

NodeLike = Union[Sequence[int], str]


class LevelOutOfBounds(DomainError):
    pass


class NodeNotInTree(DomainError):
    pass


class NoSuccessors(DomainError):
    pass


class LevelMismatch(DomainError):
    pass


class Incompatible(DomainError):
    pass


def as_node(x: NodeLike, branching: int | None = None) -> Node:
    """Coerce ``x`` to a node tuple.

    Strings are a shorthand for branching numbers up to 10: ``"01"`` is
    ``(0, 1)``.
    """
    if isinstance(x, str):
        if branching is not None and branching > 10:
            raise DomainError(f"string node {x!r} is ambiguous for branching {branching}")
        digits = tuple(int(c) for c in x)
    else:
        digits = tuple(int(c) for c in x)
    if branching is not None:
        for c in digits:
            if not 0 <= c < branching:
                raise NodeNotInTree(f"digit {c} out of range for branching {branching}")
    return digits


def node_rank(node: Node, branching: int) -> int:
    """Position of ``node`` inside its level, in lexicographic order."""
    r = 0
    for c in node:
        r = r * branching + c
    return r


def node_from_rank(rank: int, level: int, branching: int) -> Node:
    digits = [0] * level
    for i in range(level - 1, -1, -1):
        rank, digits[i] = divmod(rank, branching)
    return tuple(digits)


def node_str(node: Node) -> str:
    if all(c < 10 for c in node):
        return "".join(map(str, node)) or "()"
    return "(" + ",".join(map(str, node)) + ")"


@dataclass(frozen=True)
class HomogeneousTree:
    """The tree ``b^{<h}`` of digit sequences of length below ``height``."""

    branching: int
    height: int

    def __post_init__(self):
        if self.branching < 2:
            raise DomainError(f"branching number must be >= 2, got {self.branching}")
        if self.height < 1:
            raise DomainError(f"height must be >= 1, got {self.height}")

    @property
    def root(self) -> Node:
        return ()

    def level_size(self, n: int) -> int:
        self._check_level(n)
        return self.branching**n

    def _check_level(self, n: int) -> None:
        if not 0 <= n < self.height:
            raise LevelOutOfBounds(f"level {n} outside 0..{self.height - 1}")

    def __contains__(self, node) -> bool:
        return (
            isinstance(node, tuple)
            and len(node) < self.height
            and all(isinstance(c, int) and 0 <= c < self.branching for c in node)
        )

    def check_node(self, node: Node) -> None:
        if node not in self:
            raise NodeNotInTree(f"{node!r} is not a node of {self.branching}^<{self.height}")

    def level(self, n: int) -> Iterator[Node]:
        self._check_level(n)
        return itertools.product(range(self.branching), repeat=n)

    def nodes(self) -> Iterator[Node]:
        for n in range(self.height):
            yield from self.level(n)

    def size(self) -> int:
        return sum(self.branching**n for n in range(self.height))

    def is_maximal(self, t: Node) -> bool:
        return len(t) == self.height - 1

    def successors(self, t: Node) -> Iterator[Node]:
        """All nodes extending ``t``, ``t`` included, level by level."""
        self.check_node(t)
        for extra in range(self.height - len(t)):
            for tail in itertools.product(range(self.branching), repeat=extra):
                yield t + tail

    def immediate_successors(self, t: Node) -> list[Node]:
        self.check_node(t)
        if self.is_maximal(t):
            raise NoSuccessors(f"{node_str(t)} is maximal in {self.branching}^<{self.height}")
        return [t + (p,) for p in range(self.branching)]

    def restrict(self, n: int) -> "HomogeneousTree":
        """The initial subtree ``T(0) u ... u T(n)``."""
        self._check_level(n)
        return HomogeneousTree(self.branching, n + 1)

    def cone_size(self, t: Node, n: int) -> int:
        """``|T(n) n suc(t)|``."""
        return self.branching ** (n - len(t))


def level(tree: HomogeneousTree, n: int) -> list[Node]:
    return list(tree.level(n))


def successors(tree: HomogeneousTree, t: NodeLike) -> list[Node]:
    return list(tree.successors(as_node(t)))


def immediate_successors(tree: HomogeneousTree, t: NodeLike) -> list[Node]:
    return tree.immediate_successors(as_node(t))


def _level_subset(tree: HomogeneousTree, F: Iterable[NodeLike], n: int) -> set[Node]:
    tree._check_level(n)
    out = set()
    for x in F:
        node = as_node(x)
        if len(node) != n or node not in tree:
            raise LevelMismatch(f"{node_str(node)} is not in level {n}")
        out.add(node)
    return out


def density(tree: HomogeneousTree, F: Iterable[NodeLike], n: int) -> Fraction:
    """``|F| / |T(n)|`` for ``F`` a subset of level ``n``."""
    return Fraction(len(_level_subset(tree, F, n)), tree.level_size(n))


def relative_density(tree: HomogeneousTree, F: Iterable[NodeLike], n: int, t: NodeLike) -> Fraction:
    """Density of ``F`` inside the cone of ``t`` at level ``n``."""
    t = as_node(t)
    tree.check_node(t)
    if len(t) > n:
        raise LevelMismatch(f"node {node_str(t)} lies above level {n}")
    F = _level_subset(tree, F, n)
    hits = sum(1 for s in F if s[: len(t)] == t)
    return Fraction(hits, tree.cone_size(t, n))


@dataclass(frozen=True)
class VectorTree:
    """A tuple ``(b_1^{<h}, ..., b_d^{<h})`` of homogeneous trees of common height."""

    branchings: tuple
    height: int

    def __post_init__(self):
        object.__setattr__(self, "branchings", tuple(int(b) for b in self.branchings))
        if not self.branchings:
            raise DomainError("a vector tree needs at least one component")
        for b in self.branchings:
            if b < 2:
                raise DomainError(f"branching number must be >= 2, got {b}")
        if self.height < 1:
            raise DomainError(f"height must be >= 1, got {self.height}")

    @classmethod
    def of(cls, trees: Sequence[HomogeneousTree]) -> "VectorTree":
        heights = {t.height for t in trees}
        if len(heights) != 1:
            raise Incompatible(f"component heights differ: {sorted(heights)}")
        return cls(tuple(t.branching for t in trees), heights.pop())

    @property
    def dim(self) -> int:
        return len(self.branchings)

    @property
    def trees(self) -> tuple:
        return tuple(HomogeneousTree(b, self.height) for b in self.branchings)

    @property
    def root(self) -> Point:
        return tuple(() for _ in self.branchings)

    def level_size(self, n: int) -> int:
        if not 0 <= n < self.height:
            raise LevelOutOfBounds(f"level {n} outside 0..{self.height - 1}")
        return prod(b**n for b in self.branchings)

    def level_product(self, n: int) -> Iterator[Point]:
        """``T_1(n) x ... x T_d(n)`` in lexicographic order."""
        if not 0 <= n < self.height:
            raise LevelOutOfBounds(f"level {n} outside 0..{self.height - 1}")
        return itertools.product(
            *(itertools.product(range(b), repeat=n) for b in self.branchings)
        )

    def points(self) -> Iterator[Point]:
        for n in range(self.height):
            yield from self.level_product(n)

    def restrict(self, n: int) -> "VectorTree":
        if not 0 <= n < self.height:
            raise LevelOutOfBounds(f"level {n} outside 0..{self.height - 1}")
        return VectorTree(self.branchings, n + 1)

    def point_level(self, point: Point) -> int:
        """Level of ``point``; raises if it is not in the level product."""
        if len(point) != self.dim:
            raise NodeNotInTree(f"point {point!r} has {len(point)} coordinates, expected {self.dim}")
        levels = {len(t) for t in point}
        if len(levels) != 1:
            raise NodeNotInTree(f"point {point!r} mixes levels {sorted(levels)}")
        n = levels.pop()
        if n >= self.height:
            raise NodeNotInTree(f"point {point!r} lies above height {self.height}")
        for t, b in zip(point, self.branchings):
            if any(not 0 <= c < b for c in t):
                raise NodeNotInTree(f"point {point!r} has a digit out of range")
        return n

    def point_rank(self, point: Point) -> int:
        """Mixed-radix rank of ``point`` in its level product (coordinate 1 most significant)."""
        n = len(point[0])
        r = 0
        for t, b in zip(point, self.branchings):
            r = r * b**n + node_rank(t, b)
        return r

    def point_from_rank(self, rank: int, n: int) -> Point:
        coords = []
        for b in reversed(self.branchings):
            rank, x = divmod(rank, b**n)
            coords.append(node_from_rank(x, n, b))
        return tuple(reversed(coords))

    def successors(self, point: Point) -> tuple:
        """``suc(t)`` coordinatewise, as a tuple of node lists."""
        return tuple(
            list(HomogeneousTree(b, self.height).successors(t))
            for b, t in zip(self.branchings, point)
        )


def as_point(x, vt: VectorTree | None = None) -> Point:
    if vt is not None and vt.dim == 1 and (isinstance(x, str) or (x and isinstance(x[0], int))):
        x = (x,)
    if isinstance(x, str):
        x = (x,)
    if not x and vt is not None and vt.dim == 1:
        x = ((),)
    return tuple(as_node(t) for t in x)


def fw_measure(vt: VectorTree, A: Iterable) -> Fraction:
    """Level-averaged uniform measure of ``A`` inside the level product."""
    counts = [0] * vt.height
    seen = set()
    for x in A:
        p = as_point(x, vt)
        if p in seen:
            continue
        seen.add(p)
        counts[vt.point_level(p)] += 1
    total = sum(Fraction(c, vt.level_size(n)) for n, c in enumerate(counts))
    return total / vt.height
