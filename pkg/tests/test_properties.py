"""Hypothesis checks of the library's stated invariants."""

from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from hltrees import io as hio
from hltrees.density_search import (
    DenseSet,
    LevelSelection,
    check_pst_bound,
    find_subtree_in_set,
    section_reduce,
    signature,
    threshold,
    udhl_exact_for_L,
)
from hltrees.increment import gamma_bounds_hold, gammas, markov_concentration, markov_lower
from hltrees.io import Certificate
from hltrees.strong_subtrees import (
    StrongSubtree,
    canonical_isomorphism,
    enumerate_strong,
    is_subtree_of,
    q_formula,
    strong_subtrees_of,
    validate,
    validate_vector,
)
from hltrees.tree_core import HomogeneousTree, VectorTree, density, fw_measure, relative_density

small_trees = st.tuples(st.integers(2, 3), st.integers(1, 4)).filter(lambda bh: bh[0] ** bh[1] <= 27)


@st.composite
def node_sets(draw, b, h):
    nodes = list(HomogeneousTree(b, h).nodes())
    return [t for t in nodes if draw(st.booleans())]


@st.composite
def dense_sets(draw, max_dim=2, max_h=3):
    d = draw(st.integers(1, max_dim))
    bs = tuple(draw(st.lists(st.integers(2, 3), min_size=d, max_size=d)))
    h = draw(st.integers(1, max_h))
    vt = VectorTree(bs, h)
    assume(sum(vt.level_size(n) for n in range(h)) <= 120)
    pts = [p for p in vt.points() if draw(st.booleans())]
    return DenseSet.from_points(vt, pts)


# --- trees --------------------------------------------------------------------


@given(small_trees)
def test_level_sizes(bh):
    b, h = bh
    T = HomogeneousTree(b, h)
    assert all(sum(1 for _ in T.level(n)) == b**n for n in range(h))


@given(small_trees, st.data())
def test_relative_density_homogeneity(bh, data):
    b, h = bh
    T = HomogeneousTree(b, h)
    n = h - 1
    F = [t for t in T.level(n) if data.draw(st.booleans())]
    assert relative_density(T, F, n, ()) == density(T, F, n)
    for t in T.nodes():
        if len(t) < n:
            avg = sum(relative_density(T, F, n, c) for c in T.immediate_successors(t)) / b
            assert avg == relative_density(T, F, n, t)


@given(st.data())
def test_fw_measure_monotone_additive(data):
    vt = VectorTree((2, 2), 3)
    pts = list(vt.points())
    A = {p for p in pts if data.draw(st.booleans())}
    B = {p for p in pts if p not in A and data.draw(st.booleans())}
    assert fw_measure(vt, A | B) == fw_measure(vt, A) + fw_measure(vt, B)
    assert fw_measure(vt, A) <= fw_measure(vt, A | B) <= 1


# --- strong subtrees ----------------------------------------------------------


@given(st.integers(2, 3), st.integers(2, 4), st.data())
def test_canonical_isomorphism(b, h, data):
    assume(b**h <= 27)
    subs = list(enumerate_strong(VectorTree((b,), h), data.draw(st.integers(1, min(h, 3)))))
    S = data.draw(st.sampled_from(subs)).components[0]
    full = StrongSubtree.full(b, S.height)
    iso = canonical_isomorphism(full, S)
    src = list(full.nodes())
    img = [iso(t) for t in src]
    assert sorted(img) == sorted(S.nodes())
    assert all(iso.inverse()(iso(t)) == t for t in src)
    for t in src:
        assert S.level_set.index(len(iso(t))) == len(t)
        for c in full.ambient.immediate_successors(t) if len(t) < S.height - 1 else []:
            assert iso(c)[: len(iso(t)) + 1] == iso(t) + (c[-1],)
    model = HomogeneousTree(b, S.height)
    for k in (1, 2):
        if k > S.height:
            break
        for R in enumerate_strong(VectorTree((b,), S.height), k):
            image = iso.image(R.components[0])
            assert validate(HomogeneousTree(b, h), image) == (True, None)
            assert image.level_set == tuple(S.level_set[j] for j in R.level_set)


@given(st.integers(1, 3), st.integers(1, 4))
def test_enumeration_valid_and_distinct(h, k):
    assume(k <= h)
    vt = VectorTree((2, 2), h) if h <= 2 else VectorTree((2,), h + 1)
    seen = set()
    for s in enumerate_strong(vt, min(k, vt.height)):
        assert validate_vector(vt, s) == (True, None)
        key = tuple(c.nodes_by_level for c in s.components)
        assert key not in seen
        seen.add(key)


@given(st.integers(1, 3), st.data())
def test_strong_of_subtree_is_subset(k, data):
    vt = VectorTree((2,), 4)
    S = data.draw(st.sampled_from(list(enumerate_strong(vt, 3))))
    assume(k <= S.height)
    inner = set(strong_subtrees_of(S, k))
    assert inner <= set(enumerate_strong(vt, k))
    assert all(is_subtree_of(x, S) for x in inner)


@given(st.integers(2, 40), st.integers(1, 39), st.integers(0, 6))
def test_geometric_sums_divide(X, Y, m):
    assume(X > Y)
    assert (X ** (m + 1) - Y ** (m + 1)) % (X - Y) == 0


@given(st.lists(st.integers(2, 3), min_size=1, max_size=2), st.integers(0, 3))
def test_q_formula_positive(b_vec, m):
    x = 1
    for b in b_vec:
        x *= b**b
    y = 1
    for b in b_vec:
        y *= b
    assert q_formula(b_vec, m) == sum(x**i * y ** (m - i) for i in range(m + 1))


# --- search -------------------------------------------------------------------


@given(dense_sets(), st.integers(1, 3), st.data())
def test_search_monotone_and_matches_filter(D, k, data):
    vt = D.ambient
    assume(k <= vt.height)
    got = find_subtree_in_set(D, k)
    want = next((s for s in enumerate_strong(vt, k) if all(p in D for p in s.points())), None)
    assert got == want
    extra = [p for p in vt.points() if data.draw(st.booleans())]
    bigger = DenseSet.from_points(vt, list(D.points()) + extra)
    if got is not None:
        assert find_subtree_in_set(bigger, k) is not None


@given(small_trees, st.data())
def test_pst_bound(bh, data):
    b, h = bh
    T = HomogeneousTree(b, h)
    D = data.draw(node_sets(b, h))
    assert check_pst_bound(T, D).holds


@given(st.integers(1, 4))
def test_pst_equality_on_full_binary_tree(h):
    T = HomogeneousTree(2, h)
    chk = check_pst_bound(T, T.nodes())
    assert chk.signature_size == 2**h and chk.equality


@given(st.data())
def test_section_reduce_bound(data):
    eps = data.draw(st.sampled_from([Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1)]))
    vt = VectorTree((2, 2), 3)
    pts = []
    for n in range(3):
        lv = list(vt.level_product(n))
        need = threshold(eps, len(lv))
        pts += data.draw(st.permutations(lv))[: need + data.draw(st.integers(0, len(lv) - need))]
    D = DenseSet.from_points(vt, pts, range(3))
    C, _ = section_reduce(D, eps)
    for n in range(3):
        assert len(C.level(n)) >= eps / 2 * C.ambient.level_size(n)


@given(st.integers(1, 2), st.data())
def test_udhl_for_L_monotone(k, data):
    L = tuple(sorted(data.draw(st.sets(st.integers(0, 3), min_size=1, max_size=3))))
    extra = data.draw(st.integers(0, 3))
    assume(extra not in L)
    e1, e2 = sorted(data.draw(st.sets(st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]), min_size=2, max_size=2)))
    v_small_eps = udhl_exact_for_L([2], k, e1, L, 4).holds
    v_big_eps = udhl_exact_for_L([2], k, e2, L, 4).holds
    assert v_big_eps or not v_small_eps
    if v_small_eps:
        assert udhl_exact_for_L([2], k, e1, tuple(sorted(L + (extra,))), 4).holds


# --- increments ----------------------------------------------------------------

unit = st.fractions(min_value=Fraction(1, 50), max_value=1, max_denominator=50)


@given(unit, unit, unit)
def test_gamma_identity_and_bounds(a, b, rho):
    alpha, beta = min(a, b), max(a, b)
    t = gammas(alpha, beta, rho)
    assert t.identity_holds() and t.identity_numeric()
    assert all(gamma_bounds_hold(alpha, beta, rho).values())


ratios = st.fractions(min_value=Fraction(1, 12), max_value=1, max_denominator=12)


@st.composite
def markov_inputs(draw):
    n = draw(st.integers(1, 30))
    vals = draw(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=12), min_size=n, max_size=n))
    mean = sum(vals) / n
    assume(mean > 0)
    return vals, mean * draw(ratios)


@given(markov_inputs(), ratios)
def test_markov_lower(inp, v):
    vals, eps = inp
    assume(v < 1)
    ep = eps * v
    assert markov_lower(vals, eps, ep) >= (eps - ep) * len(vals)


@given(markov_inputs(), st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=20))
def test_markov_concentration(inp, delta):
    vals, eps = inp
    assume(sum(1 for a in vals if a >= eps + delta**2) <= delta**3 * len(vals))
    assert markov_concentration(vals, eps, delta) >= (1 - delta) * len(vals)


# --- instance files ---------------------------------------------------------------


@given(dense_sets(max_h=3), st.sampled_from([None, Fraction(1, 3), Fraction(1)]))
def test_dense_set_round_trip(D, eps):
    text = hio.dumps(D, eps, {"seed": 3})
    inst = hio.loads(text)
    assert inst.payload == D and inst.eps == eps
    assert hio.dumps(inst) == text


@given(st.data())
def test_selection_and_certificate_round_trip(data):
    vt = VectorTree((2,), 2)
    W = HomogeneousTree(2, 3)
    ls = data.draw(st.sampled_from([(0, 1), (0, 2), (1, 2)]))
    values = {p: [w for w in W.level(ls[len(p[0])]) if data.draw(st.booleans())] for p in vt.points()}
    sel = LevelSelection(vt, W, ls, values)
    text = hio.dumps(sel)
    assert hio.dumps(hio.loads(text)) == text
    assert hio.loads(text).payload == sel
    S = data.draw(st.sampled_from(list(enumerate_strong(VectorTree((2, 3), 3), 2))))
    R = data.draw(st.sampled_from([s.components[0] for s in enumerate_strong(VectorTree((2,), 3), 2) if s.level_set == S.level_set]))
    cert = Certificate(S, R)
    text = hio.dumps(cert)
    back = hio.loads(text)
    assert back.payload == cert and hio.dumps(back) == text
