from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from ksgen.graph import (EdgeVarMap, Graph, GraphFormatError, Permutation, apply_perm,
                         decode_graph6, edge_pair, edge_var, encode_graph6,
                         from_adjacency_list, induced, prefix, read_graph6_file,
                         to_adjacency_list, write_graph6_file)


@st.composite
def graphs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    code = draw(st.integers(0, (1 << comb(n, 2)) - 1))
    return Graph.from_code(n, code)


@st.composite
def graph_and_perm(draw, max_n=12):
    g = draw(graphs(max_n=max_n))
    image = draw(st.permutations(range(1, g.n + 1)))
    return g, Permutation(image)


def test_edge_var_numbering():
    assert [edge_var(1, 2), edge_var(1, 3), edge_var(2, 3), edge_var(1, 4)] == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        edge_var(3, 1)
    assert edge_pair(6) == (3, 4)
    with pytest.raises(ValueError):
        edge_var(2, 2)
    with pytest.raises(ValueError):
        edge_pair(0)


def test_prefix_block_is_contiguous():
    ev = EdgeVarMap(9)
    for k in range(2, 10):
        vs = sorted(ev.var(i, j) for j in range(2, k + 1) for i in range(1, j))
        assert vs == list(range(1, comb(k, 2) + 1))
    assert list(ev.pairs())[:3] == [(1, 2), (1, 3), (2, 3)]


@given(st.integers(1, 5000))
def test_edge_var_roundtrip(v):
    assert edge_var(*edge_pair(v)) == v


def test_graph6_known_strings():
    # standard encodings of K1, K2 and the 5-cycle 1-2-3-4-5-1
    assert encode_graph6(Graph(1)) == "@"
    assert encode_graph6(Graph(2, [(1, 2)])) == "A_"
    c5 = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
    assert encode_graph6(c5) == "Dhc"
    assert decode_graph6("Dhc") == c5


@given(graphs(max_n=70))
@settings(max_examples=60)
def test_graph6_roundtrip(g):
    assert decode_graph6(encode_graph6(g)) == g


def test_graph6_long_header():
    g = Graph(70, [(1, 70), (5, 6)])
    s = encode_graph6(g)
    assert s[0] == "~"
    assert decode_graph6(s) == g


@pytest.mark.parametrize("bad", ["", "D", "Dh", "D\x10c", "Dhcc"])
def test_graph6_malformed(bad):
    with pytest.raises(GraphFormatError):
        decode_graph6(bad)


def test_graph6_file_roundtrip(tmp_path):
    gs = [Graph(3, [(1, 2)]), Graph.complete(5), Graph(1)]
    p = tmp_path / "x.g6"
    write_graph6_file(p, gs)
    assert read_graph6_file(p) == gs


def test_graph6_file_error_names_line(tmp_path):
    p = tmp_path / "x.g6"
    p.write_text("A_\nD?\n")
    with pytest.raises(GraphFormatError, match="line 2"):
        read_graph6_file(p)


@given(graphs(max_n=10))
def test_adjacency_list_roundtrip(g):
    assert from_adjacency_list(to_adjacency_list(g)) == g


def test_adjacency_list_rejects_asymmetry():
    with pytest.raises(GraphFormatError):
        from_adjacency_list("3\n1: 2\n2:\n3:\n")


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(1, 4)])
    with pytest.raises(ValueError):
        Graph(0)


@given(graph_and_perm())
def test_apply_perm_moves_edges(gp):
    g, p = gp
    h = apply_perm(g, p)
    assert sorted(h.edges()) == sorted(tuple(sorted((p(i), p(j)))) for i, j in g.edges())
    assert apply_perm(h, p.inverse()) == g


@given(graph_and_perm(), st.data())
def test_compose(gp, data):
    g, p = gp
    q = Permutation(data.draw(st.permutations(range(1, g.n + 1))))
    assert apply_perm(apply_perm(g, q), p) == apply_perm(g, p.compose(q))


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([1, 1, 2])


@given(graphs(min_n=2, max_n=10), st.data())
def test_prefix_and_induced(g, data):
    k = data.draw(st.integers(1, g.n))
    assert prefix(g, k) == induced(g, range(1, k + 1))
    assert prefix(g, k).code() == g.code() >> (comb(g.n, 2) - comb(k, 2))
    with pytest.raises(ValueError):
        prefix(g, g.n + 1)


@given(graphs(max_n=10))
def test_code_roundtrip_and_string(g):
    assert Graph.from_code(g.n, g.code()) == g
    s = g.adjacency_string()
    assert len(s) == comb(g.n, 2)
    assert s == "".join("1" if g.has_edge(i, j) else "0" for j in range(2, g.n + 1) for i in range(1, j))


def test_remove_and_add_vertex():
    g = Graph(4, [(1, 2), (2, 3), (3, 4)])
    assert g.remove_vertex(2) == Graph(3, [(2, 3)])
    assert sorted(g.add_vertex([1, 4]).edges()) == [(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)]
    assert g.is_connected()
    assert not Graph(3, [(1, 2)]).is_connected()


def test_triangles():
    g = Graph.complete(4)
    assert g.triangles() == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
