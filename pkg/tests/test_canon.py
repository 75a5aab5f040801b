import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ksgen.canon import (LexTimeout, automorphism_generators, base_canon, is_rcl_canonical,
                         lex_canonize, lex_check, oracle_canon, rcl_canon)
from ksgen.graph import Graph, Permutation, apply_perm, decode_graph6

PETERSEN = Graph(10, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                      (5, 10), (6, 8), (8, 10), (10, 7), (7, 9), (9, 6)])


@st.composite
def graph_and_perm(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    g = Graph.from_code(n, draw(st.integers(0, (1 << comb(n, 2)) - 1)))
    return g, Permutation(draw(st.permutations(range(1, n + 1))))


def _group_order(gens, n):
    ident = tuple(range(1, n + 1))
    seen = {ident}
    frontier = [ident]
    gens = [g.image for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[x - 1] for x in p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(seen)


def test_oracle_canon_matches_orbit_minimum():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 7)
        g = Graph.from_code(n, rng.getrandbits(comb(n, 2)))
        assert oracle_canon(g).canonical_graph.code() == oracles.min_code(g)


def test_oracle_canon_refuses_large():
    with pytest.raises(ValueError):
        oracle_canon(Graph(9))


@given(graph_and_perm())
@settings(max_examples=150)
def test_base_canon_invariant(gp):
    g, p = gp
    assert base_canon(g).canonical_graph == base_canon(apply_perm(g, p)).canonical_graph


@given(graph_and_perm())
@settings(max_examples=100)
def test_base_canon_labeling_is_an_isomorphism(gp):
    g, _ = gp
    r = base_canon(g)
    assert apply_perm(g, r.labeling) == r.canonical_graph


def test_base_canon_separates_classes():
    for n in range(1, 7):
        forms = {base_canon(g).canonical_graph for g in oracles.iso_classes(n)}
        assert len(forms) == len(oracles.iso_class_codes(n))


def test_automorphism_group_sizes():
    rng = random.Random(2)
    for _ in range(150):
        n = rng.randint(2, 7)
        g = Graph.from_code(n, rng.getrandbits(comb(n, 2)))
        gens = automorphism_generators(g)
        for a in gens:
            assert apply_perm(g, a) == g
        assert _group_order(gens, n) == oracles.automorphism_count(g)


def test_petersen_automorphisms():
    gens = automorphism_generators(PETERSEN)
    assert _group_order(gens, 10) == 120


@given(graph_and_perm())
@settings(max_examples=200)
def test_rcl_invariant(gp):
    g, p = gp
    assert rcl_canon(g).canonical_graph == rcl_canon(apply_perm(g, p)).canonical_graph


@pytest.mark.parametrize("g", [Graph(12), Graph.complete(12), PETERSEN,
                               decode_graph6("Dhc"), Graph(6, [(1, 2), (3, 4), (5, 6)])])
def test_rcl_on_symmetric_graphs(g):
    r = rcl_canon(g)
    assert apply_perm(g, r.labeling) == r.canonical_graph
    assert is_rcl_canonical(r.canonical_graph) == (True, None)
    rng = random.Random(3)
    for _ in range(20):
        img = list(range(1, g.n + 1))
        rng.shuffle(img)
        assert rcl_canon(apply_perm(g, Permutation(img))).canonical_graph == r.canonical_graph


def test_rcl_hereditary_small_exhaustive():
    # the canonical graphs of order n are exactly the RCL forms of the classes
    for n in range(2, 7):
        for c in oracles.iso_classes(n):
            g = rcl_canon(c).canonical_graph
            for k in range(1, n):
                assert is_rcl_canonical(g.prefix(k))[0], (n, g, k)


def test_rcl_one_form_per_class():
    for n in range(1, 6):
        canon = [c for c in range(1 << comb(n, 2)) if is_rcl_canonical(Graph.from_code(n, c))[0]]
        assert len(canon) == len(oracles.iso_class_codes(n))


def test_rcl_witness_reaches_canonical_form():
    g = Graph(5, [(1, 2), (1, 3), (1, 4), (1, 5)])
    ok, lab = is_rcl_canonical(g)
    assert not ok
    assert is_rcl_canonical(apply_perm(g, lab))[0]


def test_rcl_cache_is_transparent():
    rng = random.Random(4)
    cache = {}
    for _ in range(100):
        n = rng.randint(2, 11)
        g = Graph.from_code(n, rng.getrandbits(comb(n, 2)))
        assert rcl_canon(g, cache) == rcl_canon(g)


def test_lex_check_against_orbit_minimum():
    rng = random.Random(5)
    for _ in range(400):
        n = rng.randint(1, 7)
        g = Graph.from_code(n, rng.getrandbits(comb(n, 2)))
        res = lex_check(g)
        assert res.is_minimal == (g.code() == oracles.min_code(g))
        if not res.is_minimal:
            assert apply_perm(g, res.witness).code() < g.code()


def test_lex_canonize_reaches_minimum():
    rng = random.Random(6)
    for _ in range(100):
        n = rng.randint(2, 7)
        g = Graph.from_code(n, rng.getrandbits(comb(n, 2)))
        assert lex_canonize(g).code() == oracles.min_code(g)


def test_lex_budget():
    g = Graph(30)
    assert lex_check(g, budget=0.0).status in ("minimal", "timeout")
    big = PETERSEN
    with pytest.raises(LexTimeout) as e:
        lex_canonize(apply_perm(big, Permutation([10, 9, 8, 7, 6, 5, 4, 3, 2, 1])), budget=0.0)
    assert e.value.partial.n == 10


def test_lex_and_rcl_forms_can_differ():
    # both canonical forms are valid, but they pick different representatives
    diff = 0
    for c in oracles.iso_classes(5):
        if is_rcl_canonical(c)[0] != lex_check(c).is_minimal:
            diff += 1
    assert diff > 0
