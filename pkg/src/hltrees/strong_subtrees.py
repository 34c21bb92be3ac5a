"""Strong subtrees of ``b^{<h}`` and vector strong subtrees.

A strong subtree is stored explicitly: its level set and, for each of its
levels, the sorted tuple of its nodes. Because the nodes of level ``j + 1``
sorted lexicographically are exactly the chosen extensions of ``s^p`` for
``s`` in level ``j`` and ``p`` in ``range(b)`` (in that order), this is the
same data as the per-direction extension choices.

Canonical order of vector strong subtrees: level set, then root point, then
the node sequence of component 1, component 2, ... Every enumeration and every
search in the package returns certificates in, or least in, this order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import BudgetError, DomainError
from .tree_core import (
    HomogeneousTree,
    Incompatible,
    Node,
    Point,
    VectorTree,
    as_node,
    node_str,
)


@dataclass(frozen=True)
class StrongSubtree:
    ambient_branching: int
    ambient_height: int
    level_set: tuple
    nodes_by_level: tuple

    def __post_init__(self):
        object.__setattr__(self, "level_set", tuple(int(x) for x in self.level_set))
        object.__setattr__(
            self,
            "nodes_by_level",
            tuple(tuple(sorted(as_node(t) for t in lvl)) for lvl in self.nodes_by_level),
        )

    @classmethod
    def full(cls, branching: int, height: int) -> "StrongSubtree":
        """``b^{<h}`` viewed as a strong subtree of itself."""
        tree = HomogeneousTree(branching, height)
        return cls(branching, height, tuple(range(height)), tuple(tuple(tree.level(n)) for n in range(height)))

    @property
    def height(self) -> int:
        return len(self.level_set)

    @property
    def root(self) -> Node:
        return self.nodes_by_level[0][0]

    @property
    def ambient(self) -> HomogeneousTree:
        return HomogeneousTree(self.ambient_branching, self.ambient_height)

    def nodes(self) -> Iterator[Node]:
        for lvl in self.nodes_by_level:
            yield from lvl

    def node_set(self) -> frozenset:
        return frozenset(self.nodes())

    def children(self, j: int, idx: int) -> tuple:
        """Immediate successors, in direction order, of the ``idx``-th node of level ``j``."""
        b = self.ambient_branching
        return self.nodes_by_level[j + 1][idx * b : (idx + 1) * b]

    def extension(self, s: Node, p: int) -> Node:
        """The unique next-level node of the subtree extending ``s^p``."""
        j = self.level_set.index(len(s))
        idx = self.nodes_by_level[j].index(s)
        return self.children(j, idx)[p]

    def sort_key(self) -> tuple:
        return (self.level_set, tuple(itertools.chain.from_iterable(self.nodes_by_level)))

    def __str__(self) -> str:
        lv = " | ".join(" ".join(node_str(t) for t in lvl) for lvl in self.nodes_by_level)
        return f"levels {list(self.level_set)}: {lv}"


@dataclass(frozen=True)
class VectorStrongSubtree:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DomainError("a vector strong subtree needs at least one component")
        sets = {c.level_set for c in self.components}
        if len(sets) != 1:
            raise Incompatible("components of a vector strong subtree must share their level set")

    @property
    def level_set(self) -> tuple:
        return self.components[0].level_set

    @property
    def height(self) -> int:
        return len(self.level_set)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def branchings(self) -> tuple:
        return tuple(c.ambient_branching for c in self.components)

    @property
    def root(self) -> Point:
        return tuple(c.root for c in self.components)

    def level_product(self, j: int) -> Iterator[Point]:
        return itertools.product(*(c.nodes_by_level[j] for c in self.components))

    def points(self) -> Iterator[Point]:
        for j in range(self.height):
            yield from self.level_product(j)

    def sort_key(self) -> tuple:
        return (
            self.level_set,
            self.root,
            tuple(tuple(itertools.chain.from_iterable(c.nodes_by_level[1:])) for c in self.components),
        )

    def __lt__(self, other: "VectorStrongSubtree") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return " ; ".join(str(c) for c in self.components)


def validate(tree: HomogeneousTree, cand: StrongSubtree) -> tuple:
    """Check clauses (a), (b), (c). Returns ``(True, None)`` or ``(False, clause)``.

    ``clause`` is one of ``"ambient"``, ``"a"``, ``"b"``, ``"c"``.
    """
    b = tree.branching
    if cand.ambient_branching != b or cand.ambient_height != tree.height:
        return False, "ambient"
    lv = cand.level_set
    levels = cand.nodes_by_level
    if len(lv) == 0 or len(lv) != len(levels):
        return False, "a"
    if len(levels[0]) != 1:
        return False, "a"
    for j in range(len(levels) - 1):
        if len(levels[j + 1]) != b * len(levels[j]):
            return False, "a"
    for j, lvl in enumerate(levels):
        if not 0 <= lv[j] < tree.height or (j and lv[j] <= lv[j - 1]):
            return False, "b"
        for t in lvl:
            if len(t) != lv[j] or t not in tree:
                return False, "b"
        if len(set(lvl)) != len(lvl):
            return False, "a"
    for j in range(len(levels) - 1):
        depth = lv[j] + 1
        claimed = {}
        for s in levels[j]:
            for p in range(b):
                claimed[s + (p,)] = 0
        for t in levels[j + 1]:
            key = t[:depth]
            if key not in claimed:
                # not above any node of the previous level: the subtree would not be balanced
                return False, "a"
            claimed[key] += 1
        if any(v != 1 for v in claimed.values()):
            return False, "c"
    return True, None


def is_valid(tree: HomogeneousTree, cand: StrongSubtree) -> bool:
    return validate(tree, cand)[0]


def validate_vector(vt: VectorTree, cand: VectorStrongSubtree) -> tuple:
    if cand.dim != vt.dim:
        return False, "ambient"
    for tree, comp in zip(vt.trees, cand.components):
        ok, clause = validate(tree, comp)
        if not ok:
            return False, clause
    return True, None


# --- counting ---------------------------------------------------------------


def count_for_level_set(branchings: Sequence[int], level_set: Sequence[int]) -> int:
    """Number of vector strong subtrees with the given level set."""
    total = 1
    for b in branchings:
        total *= b ** level_set[0]
        for j in range(len(level_set) - 1):
            gap = level_set[j + 1] - level_set[j] - 1
            total *= (b**gap) ** (b ** (j + 1))
    return total


def count_strong(vt: VectorTree, k: int) -> int:
    """``|Strong_k(T)|`` by the closed-form product, summed over level sets."""
    _check_k(vt, k)
    return sum(count_for_level_set(vt.branchings, ls) for ls in itertools.combinations(range(vt.height), k))


def q_formula(b_vec: Sequence[int], m: int) -> int:
    """Number of height-2 vector strong subtrees whose top level is ``m + 1``."""
    if any(b < 2 for b in b_vec) or not b_vec:
        raise DomainError("branching numbers must be >= 2")
    if m < 0:
        raise DomainError("m must be >= 0")
    x = prod(b**b for b in b_vec)
    y = prod(b_vec)
    num = x ** (m + 1) - y ** (m + 1)
    q, rem = divmod(num, x - y)
    assert rem == 0
    return q


# --- enumeration ------------------------------------------------------------


def _check_k(vt: VectorTree, k: int) -> None:
    if not 1 <= k <= vt.height:
        raise DomainError(f"height {k} outside 1..{vt.height}")


def _component_subtrees(b: int, height: int, level_set: tuple, root: Node) -> Iterator[StrongSubtree]:
    """All strong subtrees of ``b^{<height}`` with the given level set and root, in order."""
    k = len(level_set)

    def extend(j: int, levels: list) -> Iterator[list]:
        if j == k - 1:
            yield levels
            return
        gap = level_set[j + 1] - level_set[j] - 1
        tails = list(itertools.product(range(b), repeat=gap))
        slots = [s + (p,) for s in levels[j] for p in range(b)]
        for choice in itertools.product(tails, repeat=len(slots)):
            nxt = tuple(c + t for c, t in zip(slots, choice))
            yield from extend(j + 1, levels + [nxt])

    for levels in extend(0, [(root,)]):
        yield StrongSubtree(b, height, level_set, tuple(levels))


def enumerate_strong(vt: VectorTree, k: int, level_sets: Iterable[tuple] | None = None) -> Iterator[VectorStrongSubtree]:
    """Every element of ``Strong_k(vt)`` exactly once, in canonical order."""
    _check_k(vt, k)
    if level_sets is None:
        level_sets = itertools.combinations(range(vt.height), k)
    for ls in level_sets:
        for root in vt.level_product(ls[0]):
            per_comp = [list(_component_subtrees(b, vt.height, ls, r)) for b, r in zip(vt.branchings, root)]
            for combo in itertools.product(*per_comp):
                yield VectorStrongSubtree(combo)


def enumerate_strong_rooted(vt: VectorTree, k: int) -> Iterator[VectorStrongSubtree]:
    """Elements of ``Strong_k(vt)`` containing the root of ``vt``."""
    _check_k(vt, k)
    return enumerate_strong(
        vt, k, (ls for ls in itertools.combinations(range(vt.height), k) if ls[0] == 0)
    )


def enumerate_strong2_at(vt: VectorTree, m: int) -> Iterator[VectorStrongSubtree]:
    """Height-2 vector strong subtrees whose second level is ambient level ``m + 1``.

    The root may sit at any level ``0..m``.
    """
    if m < 0 or vt.height < m + 2:
        raise DomainError(f"need height >= m + 2 = {m + 2}, got {vt.height}")
    return enumerate_strong(vt, 2, ((l, m + 1) for l in range(m + 1)))


def strong_subtrees_of(sub: VectorStrongSubtree, k: int) -> Iterator[VectorStrongSubtree]:
    """``Strong_k(S)`` for a vector strong subtree ``S``, in ambient coordinates."""
    model = VectorTree(sub.branchings, sub.height)
    full = VectorStrongSubtree(tuple(StrongSubtree.full(b, sub.height) for b in sub.branchings))
    iso = vector_canonical_isomorphism(full, sub)
    for r in enumerate_strong(model, k):
        yield iso.image(r)


def is_subtree_of(small: VectorStrongSubtree, big: VectorStrongSubtree) -> bool:
    """True when ``small`` is a vector strong subtree of ``big``."""
    if small.dim != big.dim or small.branchings != big.branchings:
        return False
    iso = vector_canonical_isomorphism(big, _full_like(big))
    try:
        img = iso.image(small)
    except KeyError:
        return False
    return validate_vector(VectorTree(big.branchings, big.height), img)[0]


def _full_like(sub: VectorStrongSubtree) -> VectorStrongSubtree:
    return VectorStrongSubtree(tuple(StrongSubtree.full(b, sub.height) for b in sub.branchings))


# --- canonical isomorphisms -------------------------------------------------


@dataclass(frozen=True)
class CanonicalIsomorphism:
    src: StrongSubtree
    dst: StrongSubtree
    mapping: Mapping

    def __call__(self, t: Node) -> Node:
        return self.mapping[as_node(t)]

    def inverse(self) -> "CanonicalIsomorphism":
        return CanonicalIsomorphism(self.dst, self.src, {v: k for k, v in self.mapping.items()})

    def image(self, sub: StrongSubtree) -> StrongSubtree:
        """Image of a strong subtree of ``src``, as a strong subtree of ``dst``'s ambient tree."""
        levels = tuple(tuple(self.mapping[t] for t in lvl) for lvl in sub.nodes_by_level)
        level_set = tuple(len(lvl[0]) for lvl in levels)
        return StrongSubtree(self.dst.ambient_branching, self.dst.ambient_height, level_set, levels)


def canonical_isomorphism(src: StrongSubtree, dst: StrongSubtree) -> CanonicalIsomorphism:
    """The unique level- and direction-preserving bijection ``src -> dst``."""
    if src.ambient_branching != dst.ambient_branching:
        raise Incompatible(
            f"branching numbers differ: {src.ambient_branching} vs {dst.ambient_branching}"
        )
    if src.height != dst.height:
        raise Incompatible(f"heights differ: {src.height} vs {dst.height}")
    mapping = {}
    for a, b in zip(src.nodes_by_level, dst.nodes_by_level):
        # sorted order is the (parent, direction) order on both sides
        mapping.update(zip(a, b))
    return CanonicalIsomorphism(src, dst, mapping)


@dataclass(frozen=True)
class VectorCanonicalIsomorphism:
    parts: tuple

    def __call__(self, point: Point) -> Point:
        return tuple(f(t) for f, t in zip(self.parts, point))

    def inverse(self) -> "VectorCanonicalIsomorphism":
        return VectorCanonicalIsomorphism(tuple(f.inverse() for f in self.parts))

    def image(self, sub: VectorStrongSubtree) -> VectorStrongSubtree:
        return VectorStrongSubtree(tuple(f.image(c) for f, c in zip(self.parts, sub.components)))


def vector_canonical_isomorphism(src: VectorStrongSubtree, dst: VectorStrongSubtree) -> VectorCanonicalIsomorphism:
    if src.dim != dst.dim:
        raise Incompatible(f"dimensions differ: {src.dim} vs {dst.dim}")
    return VectorCanonicalIsomorphism(
        tuple(canonical_isomorphism(a, b) for a, b in zip(src.components, dst.components))
    )


def as_strong_subtree(tree: HomogeneousTree) -> StrongSubtree:
    return StrongSubtree.full(tree.branching, tree.height)


# --- Milliken verification --------------------------------------------------


class MissingColor(DomainError):
    pass


def find_monochromatic(
    vt: VectorTree,
    m: int,
    k: int,
    coloring: Callable | Mapping,
    budget: int = 10**8,
) -> VectorStrongSubtree | None:
    """Least ``S`` in ``Strong_m(vt)`` such that ``Strong_k(S)`` is monochromatic.

    ``coloring`` is a mapping or a callable on ``Strong_k(vt)``. Exhaustive.
    """
    if not 1 <= k <= m <= vt.height:
        raise DomainError(f"need 1 <= k <= m <= height, got k={k}, m={m}, height={vt.height}")
    color_of = coloring.__getitem__ if isinstance(coloring, Mapping) else coloring
    n_outer = count_strong(vt, m)
    n_inner = count_strong(VectorTree(vt.branchings, m), k)
    if n_outer * n_inner > budget:
        raise BudgetError(
            f"monochromatic search needs {n_outer * n_inner} checks", n_outer * n_inner, budget
        )
    cache = {}

    def color(s):
        if s not in cache:
            try:
                cache[s] = color_of(s)
            except KeyError:
                raise MissingColor(f"coloring has no value for {s}") from None
        return cache[s]

    if isinstance(coloring, Mapping):
        for s in enumerate_strong(vt, k):
            color(s)
    for cand in enumerate_strong(vt, m):
        colors = set()
        for s in strong_subtrees_of(cand, k):
            colors.add(color(s))
            if len(colors) > 1:
                break
        if len(colors) == 1:
            return cand
    return None
