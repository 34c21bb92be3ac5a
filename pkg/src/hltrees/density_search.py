"""Searches for strong subtrees inside dense sets and level selections.

Everything here is exhaustive and returns the least certificate in the
canonical order of :mod:`hltrees.strong_subtrees`. Work is measured in
"units" (candidate node sets or candidate subtrees tried) and capped by a
budget; the default cap is ``HLTREES_BUDGET`` or ``10**8``.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Iterable, Iterator, Mapping, Sequence

from . import kernels
from .errors import BudgetError, DomainError, InvariantViolation
from .strong_subtrees import (
    StrongSubtree,
    VectorStrongSubtree,
    count_for_level_set,
    enumerate_strong,
    vector_canonical_isomorphism,
)
from .tree_core import (
    HomogeneousTree,
    LevelMismatch,
    Node,
    Point,
    VectorTree,
    as_node,
    as_point,
    node_from_rank,
    node_rank,
)

DEFAULT_BUDGET = 10**8


def default_budget() -> int:
    raw = os.environ.get("HLTREES_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def as_fraction(x) -> Fraction:
    f = Fraction(x)
    return f


def threshold(eps: Fraction, size: int) -> int:
    """Least integer ``c`` with ``c >= eps * size``."""
    eps = Fraction(eps)
    return -((-eps.numerator * size) // eps.denominator)


# --- data -------------------------------------------------------------------


@dataclass(frozen=True)
class DenseSet:
    """A subset of the level product of ``ambient``, stored level by level."""

    ambient: VectorTree
    points_by_level: Mapping
    support_levels: tuple = ()

    def __post_init__(self):
        levels = {}
        for n, pts in dict(self.points_by_level).items():
            n = int(n)
            checked = set()
            for x in pts:
                p = as_point(x, self.ambient)
                if self.ambient.point_level(p) != n:
                    raise LevelMismatch(f"point {p!r} does not lie on level {n}")
                checked.add(p)
            if checked:
                levels[n] = frozenset(checked)
        object.__setattr__(self, "points_by_level", levels)
        object.__setattr__(self, "support_levels", tuple(sorted(int(n) for n in self.support_levels)))
        for n in self.support_levels:
            if not 0 <= n < self.ambient.height:
                raise DomainError(f"support level {n} outside the ambient height")

    @classmethod
    def from_points(cls, ambient: VectorTree, points: Iterable, support_levels: Iterable[int] | None = None) -> "DenseSet":
        by_level: dict = {}
        for x in points:
            p = as_point(x, ambient)
            by_level.setdefault(ambient.point_level(p), set()).add(p)
        if support_levels is None:
            support_levels = sorted(by_level)
        return cls(ambient, by_level, tuple(support_levels))

    @classmethod
    def full(cls, ambient: VectorTree) -> "DenseSet":
        return cls(
            ambient,
            {n: set(ambient.level_product(n)) for n in range(ambient.height)},
            tuple(range(ambient.height)),
        )

    def level(self, n: int) -> frozenset:
        return self.points_by_level.get(n, frozenset())

    def points(self) -> Iterator[Point]:
        for n in sorted(self.points_by_level):
            yield from sorted(self.points_by_level[n])

    def __contains__(self, point) -> bool:
        p = as_point(point, self.ambient)
        return p in self.level(len(p[0]))

    def __len__(self) -> int:
        return sum(len(v) for v in self.points_by_level.values())

    def density_at(self, n: int) -> Fraction:
        return Fraction(len(self.level(n)), self.ambient.level_size(n))

    def is_dense(self, eps) -> bool:
        eps = Fraction(eps)
        return all(
            len(self.level(n)) >= threshold(eps, self.ambient.level_size(n)) for n in self.support_levels
        )

    def rows(self) -> list:
        """Membership rows by ambient level for one-dimensional sets."""
        if self.ambient.dim != 1:
            raise DomainError("membership rows exist only for one-dimensional sets")
        b = self.ambient.branchings[0]
        out = []
        for n in range(self.ambient.height):
            row = bytearray(b**n)
            for (t,) in self.level(n):
                row[node_rank(t, b)] = 1
            out.append(row)
        return out


@dataclass(frozen=True)
class LevelSelection:
    """A map from the level product of ``ambient`` into subsets of levels of ``target``.

    Points of ``ambient`` level ``n`` are mapped into ``target`` level ``level_set[n]``.
    Points absent from ``values`` map to the empty set.
    """

    ambient: VectorTree
    target: HomogeneousTree
    level_set: tuple
    values: Mapping

    def __post_init__(self):
        ls = tuple(int(x) for x in self.level_set)
        object.__setattr__(self, "level_set", ls)
        if len(ls) != self.ambient.height:
            raise DomainError(f"level set has {len(ls)} entries, expected {self.ambient.height}")
        if any(b <= a for a, b in zip(ls, ls[1:])) or (ls and (ls[0] < 0 or ls[-1] >= self.target.height)):
            raise DomainError(f"level set {list(ls)} must be increasing and inside the target tree")
        vals = {}
        for x, nodes in dict(self.values).items():
            p = as_point(x, self.ambient)
            n = self.ambient.point_level(p)
            sec = frozenset(as_node(w) for w in nodes)
            for w in sec:
                if len(w) != ls[n] or w not in self.target:
                    raise LevelMismatch(f"value {w!r} at {p!r} is not in target level {ls[n]}")
            if sec:
                vals[p] = sec
        object.__setattr__(self, "values", vals)

    def __call__(self, point) -> frozenset:
        return self.values.get(as_point(point, self.ambient), frozenset())

    @property
    def height(self) -> int:
        return self.ambient.height

    def density_of(self, point) -> Fraction:
        p = as_point(point, self.ambient)
        n = len(p[0])
        return Fraction(len(self(p)), self.target.branching ** self.level_set[n])

    def density(self) -> Fraction:
        """Minimum section density over the whole level product."""
        return min(self.density_of(p) for p in self.ambient.points())

    def restrict(self, sub: VectorStrongSubtree) -> tuple:
        """``D`` restricted to ``sub``, re-indexed over the canonical tree of ``sub``'s height.

        Returns ``(selection, iso)`` where ``iso`` maps canonical points into ``sub``.
        """
        model = VectorTree(sub.branchings, sub.height)
        full = VectorStrongSubtree(tuple(StrongSubtree.full(b, sub.height) for b in sub.branchings))
        iso = vector_canonical_isomorphism(full, sub)
        values = {p: self(iso(p)) for p in model.points()}
        ls = tuple(self.level_set[m] for m in sub.level_set)
        return LevelSelection(model, self.target, ls, values), iso


@dataclass(frozen=True)
class WitnessPair:
    s: VectorStrongSubtree
    r: StrongSubtree


@dataclass
class SearchStats:
    counters: Counter = field(default_factory=Counter)

    def add(self, other: "SearchStats") -> None:
        self.counters.update(other.counters)

    def as_dict(self) -> dict:
        return {k: self.counters[k] for k in sorted(self.counters)}


# --- parallel helpers --------------------------------------------------------


def _run_units(fn, units: Sequence, jobs: int) -> Iterator:
    """Yield ``fn(u)`` for each unit in order; with ``jobs > 1`` units run in a process pool."""
    if jobs <= 1 or len(units) <= 1:
        for u in units:
            yield fn(u)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(fn, units, chunksize=1)


# --- subtree search in dense sets ------------------------------------------


def _d1_search(D: DenseSet, level_set: tuple, root: int = -1):
    b = D.ambient.branchings[0]
    ranks = kernels.d1_least(D.rows(), b, level_set, root)
    if ranks is None:
        return None
    levels = tuple(tuple(node_from_rank(x, n, b) for x in lvl) for lvl, n in zip(ranks, level_set))
    return VectorStrongSubtree((StrongSubtree(b, D.ambient.height, level_set, levels),))


def _slice(sets: list, x) -> list:
    return [{p[1:] for p in s if p[0] == x} for s in sets]


def _vector_search(branchings: tuple, height: int, level_set: tuple, sets: list, root: tuple, stats: Counter):
    """Least component tuple with the given level set and root whose level products lie in ``sets``.

    ``sets[j]`` is the set of points (tuples over the remaining coordinates) allowed
    at subtree level ``j``.
    """
    b = branchings[0]
    if len(branchings) == 1:
        rows = [None] * height
        for j, n in enumerate(level_set):
            row = bytearray(b**n)
            for (t,) in sets[j]:
                row[node_rank(t, b)] = 1
            rows[n] = row
        stats["candidates"] += 1
        ranks = kernels.d1_least(rows, b, level_set, node_rank(root[0], b))
        if ranks is None:
            return None
        levels = tuple(tuple(node_from_rank(x, n, b) for x in lvl) for lvl, n in zip(ranks, level_set))
        return (StrongSubtree(b, height, level_set, levels),)
    projections = [{p[0] for p in s} for s in sets]
    for comp in _component_candidates(b, height, level_set, root[0], projections):
        stats["candidates"] += 1
        sliced = []
        for j, lvl in enumerate(comp):
            common = None
            for x in lvl:
                part = {p[1:] for p in sets[j] if p[0] == x}
                common = part if common is None else common & part
                if not common:
                    break
            if not common:
                break
            sliced.append(common)
        else:
            rest = _vector_search(branchings[1:], height, level_set, sliced, root[1:], stats)
            if rest is not None:
                return (StrongSubtree(b, height, level_set, comp),) + rest
    return None


def _component_candidates(b, height, level_set, root, allowed):
    """Strong subtrees of ``b^{<height}`` (as level tuples) with nodes in ``allowed``, in order."""
    k = len(level_set)
    if root not in allowed[0]:
        return

    def extend(j, levels):
        if j == k - 1:
            yield levels
            return
        gap = level_set[j + 1] - level_set[j] - 1
        options = []
        for s in levels[j]:
            for p in range(b):
                opts = [
                    s + (p,) + tail
                    for tail in itertools.product(range(b), repeat=gap)
                    if s + (p,) + tail in allowed[j + 1]
                ]
                if not opts:
                    return
                options.append(opts)
        for choice in itertools.product(*options):
            yield from extend(j + 1, levels + [tuple(choice)])

    yield from extend(0, [(root,)])


def _search_sets(vt: VectorTree, by_level: Mapping, level_set: tuple, stats: Counter):
    stats["level_sets"] += 1
    sets = [by_level.get(n) for n in level_set]
    if not all(sets):
        return None
    for root in sorted(sets[0]):
        comps = _vector_search(vt.branchings, vt.height, level_set, sets, root, stats)
        if comps is not None:
            return VectorStrongSubtree(comps)
    return None


def _search_level_set(D: DenseSet, level_set: tuple, stats: Counter):
    if D.ambient.dim == 1:
        stats["level_sets"] += 1
        if any(not D.level(n) for n in level_set):
            return None
        stats["candidates"] += 1
        return _d1_search(D, level_set)
    return _search_sets(D.ambient, D.points_by_level, level_set, stats)


def _search_unit(args):
    D, level_set = args
    stats = Counter()
    found = _search_level_set(D, level_set, stats)
    return found, stats


def find_subtree_in_set(
    D: DenseSet,
    k: int,
    *,
    level_sets: Iterable[tuple] | None = None,
    jobs: int = 1,
    stats: SearchStats | None = None,
) -> VectorStrongSubtree | None:
    """Least vector strong subtree of height ``k`` whose level product lies in ``D``."""
    if not 1 <= k <= D.ambient.height:
        raise DomainError(f"height {k} outside 1..{D.ambient.height}")
    if level_sets is None:
        occupied = sorted(D.points_by_level)
        level_sets = itertools.combinations(occupied, k)
    units = [(D, tuple(ls)) for ls in level_sets]
    total = SearchStats()
    found = None
    for cert, st in _run_units(_search_unit, units, jobs):
        total.counters.update(st)
        if cert is not None:
            found = cert
            break
    if stats is not None:
        stats.add(total)
    return found


# --- exact UDHL numbers ------------------------------------------------------


@dataclass(frozen=True)
class LVerdict:
    holds: bool
    levels: tuple
    counterexample: DenseSet | None
    units: int


def _adversary_vector(vt: VectorTree, k: int, levels: tuple, need: list, max_units: int):
    """Generic-dimension counterpart of ``kernels.adversary_d1`` (same visiting order)."""
    units = 0
    chosen: dict = {}

    def exists_top(i):
        top = levels[i]
        for combo in itertools.combinations(levels[:i], k - 1):
            if _search_sets(vt, chosen, combo + (top,), Counter()) is not None:
                return True
        return False

    def rec(i):
        nonlocal units
        if i == len(levels):
            return kernels.STATUS_FOUND
        n = levels[i]
        size = vt.level_size(n)
        for combo in itertools.combinations(range(size), need[i]):
            units += 1
            if units > max_units:
                return kernels.STATUS_BUDGET
            chosen[n] = {vt.point_from_rank(x, n) for x in combo}
            if not exists_top(i):
                status = rec(i + 1)
                if status != kernels.STATUS_NONE:
                    return status
            del chosen[n]
        return kernels.STATUS_NONE

    status = rec(0)
    if status == kernels.STATUS_FOUND:
        return status, [tuple(sorted(vt.point_rank(p) for p in chosen[n])) for n in levels], units
    return status, None, units


def udhl_exact_for_L(
    b_vec: Sequence[int],
    k: int,
    eps,
    L: Sequence[int],
    ambient_height: int | None = None,
    budget: int | None = None,
) -> LVerdict:
    """Does every ``eps``-dense set supported on ``L`` contain a height-``k`` subtree?

    Only sets with exactly the minimal number of points per level are examined:
    adding points never removes a subtree. On failure the least counterexample
    (level by level, lexicographic rank combinations) is returned.
    """
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise DomainError(f"density must lie in (0, 1], got {eps}")
    L = tuple(sorted(set(int(n) for n in L)))
    if not L:
        raise DomainError("L must be nonempty")
    if ambient_height is None:
        ambient_height = L[-1] + 1
    if L[0] < 0 or L[-1] >= ambient_height:
        raise DomainError(f"levels {list(L)} do not fit below height {ambient_height}")
    if k < 1:
        raise DomainError("k must be >= 1")
    vt = VectorTree(tuple(b_vec), ambient_height)
    budget = default_budget() if budget is None else budget
    need = [threshold(eps, vt.level_size(n)) for n in L]
    if k == 1:
        # every nonempty level already holds a height-1 subtree
        return LVerdict(True, L, None, 0)
    if vt.dim == 1:
        status, ce, units = kernels.adversary_d1(vt.branchings[0], k, L, need, budget)
    else:
        status, ce, units = _adversary_vector(vt, k, L, need, budget)
    if status == kernels.STATUS_BUDGET:
        raise BudgetError(f"adversarial search over L={list(L)} exceeded {budget} units", units, budget)
    if status == kernels.STATUS_NONE:
        return LVerdict(True, L, None, units)
    by_level = {n: {vt.point_from_rank(x, n) for x in ranks} for n, ranks in zip(L, ce)}
    return LVerdict(False, L, DenseSet(vt, by_level, L), units)


@dataclass(frozen=True)
class ExactNumber:
    """Least ``N`` (within ``window``) that works for every admissible ``L``; ``value`` is
    ``None`` when even ``N = window`` fails."""

    value: int | None
    window: int
    counterexample: object | None
    units: int
    per_size: tuple


def _udhl_unit(args):
    b_vec, k, eps, L, window, budget = args
    return udhl_exact_for_L(b_vec, k, eps, L, window, budget)


def udhl_exact(b_vec: Sequence[int], k: int, eps, window: int, *, jobs: int = 1, budget: int | None = None) -> ExactNumber:
    """Exact uniform-density number, certified for level sets inside ``range(window)``."""
    eps = as_fraction(eps)
    if window < 1:
        raise DomainError("window must be >= 1")
    budget = default_budget() if budget is None else budget
    units = 0
    last_counterexample = None
    per_size = []
    for N in range(1, window + 1):
        Ls = list(itertools.combinations(range(window), N))
        failing = None
        for verdict in _run_units(_udhl_unit, [(tuple(b_vec), k, eps, L, window, budget) for L in Ls], jobs):
            units += verdict.units
            if units > budget:
                raise BudgetError(f"exact search exceeded {budget} units", units, budget)
            if not verdict.holds:
                failing = verdict
                break
        per_size.append((N, failing is None))
        if failing is None:
            return ExactNumber(N, window, last_counterexample, units, tuple(per_size))
        last_counterexample = failing
    return ExactNumber(None, window, last_counterexample, units, tuple(per_size))


# --- signature and weight ----------------------------------------------------


def _subset_rows(tree: HomogeneousTree, D: Iterable) -> list:
    rows = [bytearray(tree.branching**n) for n in range(tree.height)]
    for x in D:
        t = as_node(x)
        tree.check_node(t)
        rows[len(t)][node_rank(t, tree.branching)] = 1
    return rows


def signature(tree: HomogeneousTree, D: Iterable) -> frozenset:
    """Level sets of the strong subtrees contained in ``D``, the empty level set included."""
    rows = _subset_rows(tree, D)
    occupied = [n for n in range(tree.height) if any(rows[n])]
    out = {()}
    for k in range(1, len(occupied) + 1):
        for ls in itertools.combinations(occupied, k):
            if kernels.d1_least(rows, tree.branching, ls) is not None:
                out.add(ls)
    return frozenset(out)


def weight(tree: HomogeneousTree, D: Iterable) -> Fraction:
    counts = [0] * tree.height
    for x in set(as_node(x) for x in D):
        tree.check_node(x)
        counts[len(x)] += 1
    return sum((Fraction(c, tree.branching**n) for n, c in enumerate(counts)), Fraction(0))


@dataclass(frozen=True)
class PstCheck:
    holds: bool
    signature_size: int
    weight: Fraction
    equality: bool

    @property
    def bound_text(self) -> str:
        return f"({self.base})^({self.weight})"

    base: str = ""


def check_pst_bound(tree: HomogeneousTree, D: Iterable) -> PstCheck:
    """``|signature| >= (b/(b-1))^weight``, decided as ``|S|^q (b-1)^p >= b^p`` with ``weight = p/q``."""
    D = list(D)
    size = len(signature(tree, D))
    w = weight(tree, D)
    b = tree.branching
    p, q = w.numerator, w.denominator
    lhs = size**q * (b - 1) ** p
    rhs = b**p
    return PstCheck(lhs >= rhs, size, w, lhs == rhs, f"{b}/{b - 1}")


# --- the section map ---------------------------------------------------------


def section_reduce(Dfull: DenseSet, eps) -> tuple:
    """Split a ``(d+1)``-dimensional dense set into dense sections.

    Returns ``(C, sel)``: ``C`` holds, on each support level, the points of the
    first ``d`` coordinates whose section has density at least ``eps/2``; ``sel``
    is the section map over the first ``d`` coordinates with identity level set.
    """
    eps = as_fraction(eps)
    vt = Dfull.ambient
    if vt.dim < 2:
        raise DomainError("section_reduce needs at least two coordinates")
    base = VectorTree(vt.branchings[:-1], vt.height)
    bw = vt.branchings[-1]
    for n in Dfull.support_levels:
        if len(Dfull.level(n)) < threshold(eps, vt.level_size(n)):
            raise DomainError(f"density on support level {n} is {Dfull.density_at(n)} < {eps}")
    sections: dict = {}
    for n, pts in Dfull.points_by_level.items():
        for p in pts:
            sections.setdefault(p[:-1], set()).add(p[-1])
    half = eps / 2
    C = {}
    for n in Dfull.support_levels:
        need = threshold(half, bw**n)
        C[n] = {t for t in base.level_product(n) if len(sections.get(t, ())) >= need}
        if len(C[n]) < threshold(half, base.level_size(n)):
            raise InvariantViolation(f"|C_{n}| = {len(C[n])} below (eps/2)|level| on level {n}")
    sel = LevelSelection(base, HomogeneousTree(bw, vt.height), tuple(range(vt.height)), sections)
    return DenseSet(base, C, Dfull.support_levels), sel


# --- level-selection witnesses -----------------------------------------------


def _intersections(sel: LevelSelection, S: VectorStrongSubtree):
    out = []
    for j in range(S.height):
        common = None
        for p in S.level_product(j):
            sec = sel(p)
            common = set(sec) if common is None else common & sec
            if not common:
                return None
        out.append(common)
    return out


def _witness_for(sel: LevelSelection, S: VectorStrongSubtree):
    inter = _intersections(sel, S)
    if inter is None:
        return None
    W = sel.target
    wl = tuple(sel.level_set[m] for m in S.level_set)
    rows = [None] * W.height
    for lvl, nodes in zip(wl, inter):
        row = bytearray(W.branching**lvl)
        for w in nodes:
            row[node_rank(w, W.branching)] = 1
        rows[lvl] = row
    ranks = kernels.d1_least(rows, W.branching, wl)
    if ranks is None:
        return None
    levels = tuple(tuple(node_from_rank(x, n, W.branching) for x in lvl) for lvl, n in zip(ranks, wl))
    return StrongSubtree(W.branching, W.height, wl, levels)


def find_ls_witness(
    sel: LevelSelection,
    k: int,
    *,
    level_sets: Iterable[tuple] | None = None,
    budget: int | None = None,
    stats: SearchStats | None = None,
) -> WitnessPair | None:
    """Least ``(S, R)`` with ``R(n)`` inside every section over ``S``'s ``n``-th level."""
    vt = sel.ambient
    if not 1 <= k <= vt.height:
        raise DomainError(f"height {k} outside 1..{vt.height}")
    budget = default_budget() if budget is None else budget
    if level_sets is None:
        level_sets = list(itertools.combinations(range(vt.height), k))
    else:
        level_sets = [tuple(ls) for ls in level_sets]
    needed = sum(count_for_level_set(vt.branchings, ls) for ls in level_sets)
    if needed > budget:
        raise BudgetError(f"witness search would enumerate {needed} subtrees", needed, budget)
    tried = 0
    try:
        for ls in level_sets:
            for S in enumerate_strong(vt, k, [ls]):
                tried += 1
                R = _witness_for(sel, S)
                if R is not None:
                    return WitnessPair(S, R)
        return None
    finally:
        if stats is not None:
            stats.counters["candidates"] += tried


def _witness_exists_top(sel_partial: LevelSelection, k: int, top: int) -> bool:
    if top < k - 1:
        return False
    level_sets = [c + (top,) for c in itertools.combinations(range(top), k - 1)]
    return find_ls_witness(sel_partial, k, level_sets=level_sets, budget=10**18) is not None


def ls_exact_for_levels(
    b_vec_plus: Sequence[int], k: int, eps, level_set: Sequence[int], window: int, budget: int | None = None
) -> LVerdict:
    """Does every selection with this level set and density ``eps`` admit a witness of height ``k``?"""
    eps = as_fraction(eps)
    b_vec, bw = tuple(b_vec_plus[:-1]), b_vec_plus[-1]
    N = len(level_set)
    vt = VectorTree(b_vec, N)
    W = HomogeneousTree(bw, window)
    budget = default_budget() if budget is None else budget
    points = [list(vt.level_product(n)) for n in range(N)]
    need = [threshold(eps, bw ** level_set[n]) for n in range(N)]
    values: dict = {}
    units = 0
    outcome = None

    def assign(n, i):
        nonlocal units, outcome
        if i == len(points[n]):
            sel = LevelSelection(VectorTree(b_vec, n + 1), W, level_set[: n + 1], values)
            if _witness_exists_top(sel, k, n):
                return False
            if n + 1 == N:
                outcome = LevelSelection(vt, W, level_set, dict(values))
                return True
            return assign(n + 1, 0)
        p = points[n][i]
        for combo in itertools.combinations(range(bw ** level_set[n]), need[n]):
            units += 1
            if units > budget:
                raise BudgetError(f"level-selection search exceeded {budget} units", units, budget)
            values[p] = [node_from_rank(x, level_set[n], bw) for x in combo]
            if assign(n, i + 1):
                return True
        values.pop(p, None)
        return False

    found = assign(0, 0)
    return LVerdict(not found, tuple(level_set), outcome, units)


def ls_exact(b_vec_plus: Sequence[int], k: int, eps, window: int, *, budget: int | None = None) -> ExactNumber:
    """Least height ``N`` such that every ``eps``-dense selection with level set inside the
    window admits a witness pair of height ``k``."""
    eps = as_fraction(eps)
    if len(b_vec_plus) < 2:
        raise DomainError("need at least two branching numbers (d >= 1 plus the target)")
    if not 0 < eps <= 1:
        raise DomainError(f"density must lie in (0, 1], got {eps}")
    budget = default_budget() if budget is None else budget
    units = 0
    last = None
    per_size = []
    for N in range(1, window + 1):
        failing = None
        for ls in itertools.combinations(range(window), N):
            v = ls_exact_for_levels(b_vec_plus, k, eps, ls, window, budget - units)
            units += v.units
            if not v.holds:
                failing = v
                break
        per_size.append((N, failing is None))
        if failing is None:
            return ExactNumber(N, window, last, units, tuple(per_size))
        last = failing
    return ExactNumber(None, window, last, units, tuple(per_size))


# --- gluing sections back together -------------------------------------------


@dataclass(frozen=True)
class GlueResult:
    reduced: DenseSet
    selection: LevelSelection
    host: VectorStrongSubtree | None
    witness: WitnessPair | None
    glued: VectorStrongSubtree | None


def glue_sections(Dfull: DenseSet, eps, k: int, host_height: int | None = None) -> GlueResult:
    """Run the section-map reduction end to end.

    Finds a host subtree of height ``host_height`` (default: the tallest available)
    inside the reduced set, looks for a witness pair of height ``k`` in the restricted
    section map, and glues it into a ``(d+1)``-dimensional certificate.
    """
    C, sel = section_reduce(Dfull, eps)
    heights = [host_height] if host_height else range(C.ambient.height, 0, -1)
    host = None
    for m in heights:
        if m < k:
            break
        host = find_subtree_in_set(C, m)
        if host is not None:
            break
    if host is None:
        return GlueResult(C, sel, None, None, None)
    restricted, iso = sel.restrict(host)
    witness = find_ls_witness(restricted, k)
    if witness is None:
        return GlueResult(C, sel, host, None, None)
    S = iso.image(witness.s)
    glued = VectorStrongSubtree(S.components + (witness.r,))
    for p in glued.points():
        if p not in Dfull:
            raise InvariantViolation(f"glued certificate leaves the dense set at {p!r}")
    return GlueResult(C, sel, host, WitnessPair(S, witness.r), glued)
