"""Pure-Python search kernels. Same API and same visiting order as ``_ckernels``.

Membership of a set of nodes of ``b^{<h}`` at ambient level ``n`` is a
bytes-like of length ``b**n`` indexed by node rank (nonzero means member).
"""

from __future__ import annotations

from itertools import combinations

IMPLEMENTATION = "python"

STATUS_NONE = 0
STATUS_FOUND = 1
STATUS_BUDGET = 2


def _ok_tables(mem, b, level_set):
    """Bottom-up tables ``ok[j][x]``: node ``x`` at ``level_set[j]`` roots a subtree on ``level_set[j:]``."""
    k = len(level_set)
    ok = [None] * k
    ok[k - 1] = bytes(1 if v else 0 for v in mem[level_set[k - 1]])
    for j in range(k - 2, -1, -1):
        a, nxt = level_set[j], level_set[j + 1]
        block = b ** (nxt - a - 1)
        below = ok[j + 1]
        m = mem[a]
        size = b**a
        row = bytearray(size)
        for x in range(size):
            if not m[x]:
                continue
            base = x * b * block
            good = True
            for p in range(b):
                lo = base + p * block
                if not any(below[lo : lo + block]):
                    good = False
                    break
            if good:
                row[x] = 1
        ok[j] = row
    return ok


def d1_least(mem, b, level_set, root=-1):
    """Lexicographically least strong subtree with exactly this level set.

    Returns a list of rank lists (one per subtree level) or ``None``.
    ``root`` pins the root rank when nonnegative.
    """
    level_set = list(level_set)
    k = len(level_set)
    ok = _ok_tables(mem, b, level_set)
    if root >= 0:
        if not ok[0][root]:
            return None
        chosen = [root]
    else:
        first = ok[0].find(1)
        if first < 0:
            return None
        chosen = [first]
    out = [chosen]
    for j in range(k - 1):
        a, nxt = level_set[j], level_set[j + 1]
        block = b ** (nxt - a - 1)
        below = ok[j + 1]
        level_nodes = []
        for x in out[j]:
            for p in range(b):
                lo = (x * b + p) * block
                y = below.find(1, lo, lo + block)
                level_nodes.append(y)
        out.append(level_nodes)
    return out


def _exists_top(mem, b, levels, i_top, k):
    """Is there a subtree of height ``k`` whose levels lie in ``levels[:i_top + 1]`` and end at ``levels[i_top]``?"""
    top = levels[i_top]
    if k == 1:
        return any(mem[top])
    for combo in combinations(levels[:i_top], k - 1):
        ok = _ok_tables(mem, b, list(combo) + [top])
        if any(ok[0]):
            return True
    return False


def adversary_d1(b, k, levels, need, max_units, observer=None):
    """Search for a set supported on ``levels`` with ``need[i]`` nodes on ``levels[i]``
    and no strong subtree of height ``k``.

    Sets are tried level by level, each level's node set in lexicographic order of
    rank combinations; a partial set that already contains a subtree is pruned.
    Returns ``(status, counterexample, units)`` where ``counterexample`` is a list of
    rank tuples (one per level) and ``units`` counts the node sets tried.
    ``observer(i, mem, pruned)``, if given, sees every partial set visited.
    """
    levels = list(levels)
    top_level = levels[-1] if levels else 0
    mem = [bytearray(b**n) if n in levels else None for n in range(top_level + 1)]
    units = 0
    chosen = [None] * len(levels)

    def rec(i):
        nonlocal units
        if i == len(levels):
            return STATUS_FOUND
        n = levels[i]
        row = mem[n]
        for combo in combinations(range(b**n), need[i]):
            units += 1
            if units > max_units:
                return STATUS_BUDGET
            for x in combo:
                row[x] = 1
            pruned = _exists_top(mem, b, levels, i, k)
            if observer is not None:
                observer(i, mem, pruned)
            if not pruned:
                chosen[i] = combo
                status = rec(i + 1)
                if status != STATUS_NONE:
                    return status
            for x in combo:
                row[x] = 0
        return STATUS_NONE

    status = rec(0)
    if status == STATUS_FOUND:
        return status, [tuple(c) for c in chosen], units
    return status, None, units
