import random
import time

import pytest

from ksgen.encode import BaseFixing, EncodeOptions, encode
from ksgen.geom import (BUILTIN_SETS, Deriver, GeometryError, GeometryHook, RaySet, builtin,
                        closure, cross, cross_raw, dot, family_37, is_parallel, normalize,
                        orthogonality_graph, realizability_status, schutte_33)
from ksgen.graph import edge_var, induced
from ksgen.proof import ProofRecorder, verify
from ksgen.sat import Solver

AXES = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
# 4 = (1,1,1) and 5 = (2,-1,-1) are orthogonal; a free vertex on {1, 4} gets
# (0,1,-1), and one on {4, that vertex} gets (2,-1,-1) again.
CHAIN_BASE = RaySet(AXES + [(1, 1, 1), (2, -1, -1)])


def test_normalize():
    assert normalize((2, 4, -6)) == (1, 2, -3)
    assert normalize((0, -2, 0)) == (0, 1, 0)
    assert normalize((-3, 0, 6)) == (1, 0, -2)
    for bad in [(0, 0, 0), (1, 2), (1.5, 0, 0)]:
        with pytest.raises(GeometryError):
            normalize(bad)


def test_cross_and_parallel():
    assert cross((1, 0, 0), (0, 1, 0)) == (0, 0, 1)
    assert cross_raw((1, 1, 0), (2, 2, 0)) == (0, 0, 0)
    with pytest.raises(GeometryError):
        cross((1, 1, 0), (-2, -2, 0))
    assert is_parallel((1, 2, 3), (-2, -4, -6))
    assert not is_parallel((1, 2, 3), (1, 2, 4))


def test_cross_dot_identities_sample():
    rng = random.Random(31)
    for _ in range(2000):
        u = tuple(rng.randint(-50, 50) for _ in range(3))
        v = tuple(rng.randint(-50, 50) for _ in range(3))
        c = cross_raw(u, v)
        assert dot(c, u) == 0 and dot(c, v) == 0
        assert dot(c, c) == dot(u, u) * dot(v, v) - dot(u, v) ** 2


def test_rayset_validation_and_io(tmp_path):
    with pytest.raises(GeometryError):
        RaySet([(1, 0, 0), (-2, 0, 0)])
    rs = RaySet([(1, 0, 0), (0, 1, 1)])
    p = tmp_path / "r.rays"
    rs.write(p, "two rays")
    assert p.read_text().startswith("# two rays")
    assert RaySet.read(p) == rs
    with pytest.raises(GeometryError):
        RaySet.from_text("1 0\n")
    assert RaySet.from_text("# c\n\n2 0 0\n").rays == [(1, 0, 0)]


def test_builtins():
    sizes = {"yu-oh-13": 13, "closure-25": 25, "schutte-33": 33, "ck-37": 37}
    for name in BUILTIN_SETS:
        assert len(builtin(name)) == sizes[name]
    with pytest.raises(KeyError):
        builtin("nope")
    assert builtin("schutte-33") == schutte_33()
    assert builtin("ck-37") == family_37()


def test_closure():
    t = time.perf_counter()
    c = closure(builtin("yu-oh-13"))
    assert time.perf_counter() - t < 1.0
    assert len(c) == 25
    assert closure(c) == c
    assert set(closure(AXES).rays) == set(AXES)
    # no orthogonal pair: nothing to add
    assert len(closure([(1, 0, 0), (1, 1, 0)])) == 2


def test_closure_25_inside_schutte():
    s = schutte_33()
    c = builtin("closure-25")
    assert set(c.rays) <= set(s.rays)
    idx = [s.index(r) + 1 for r in c.rays]
    assert induced(orthogonality_graph(s), idx) == orthogonality_graph(c)
    assert orthogonality_graph(s).num_edges() == 76
    assert orthogonality_graph(c).num_edges() == 48


def test_schutte_extra_rays():
    extra = set(schutte_33().rays) - set(builtin("closure-25").rays)
    assert extra == {(1, 0, 2), (1, 0, -2), (2, 0, 1), (2, 0, -1),
                     (1, 2, 0), (1, -2, 0), (2, 1, 0), (2, -1, 0)}


def _chain_deriver(n, edges):
    d = Deriver(list(CHAIN_BASE), n)
    for i, j in edges:
        d.add_edge(i, j)
    return d


def test_deriver_parallel_chain():
    d = _chain_deriver(7, [(1, 6), (4, 6), (4, 7), (6, 7)])
    cf = d.derive_all()
    assert cf.kind == "parallel"
    assert (cf.v, cf.w) == (5, 7)
    assert cf.edges == {edge_var(1, 6), edge_var(4, 6), edge_var(4, 7), edge_var(6, 7)}
    assert d.known[6].ray == (0, 1, -1)
    assert d.known[6].parents == (1, 4)


def test_deriver_orthogonality_conflict():
    # 7 on {4, 5} gets (0,1,-1), which is not orthogonal to 6 = (1,0,-1)
    d = Deriver(list(CHAIN_BASE) + [(1, 0, -1)], 7)
    for i, j in [(4, 7), (5, 7), (6, 7)]:
        d.add_edge(i, j)
    cf = d.derive_all()
    assert cf.kind == "orthogonality"
    assert cf.edges == {edge_var(4, 7), edge_var(5, 7), edge_var(6, 7)}


def test_deriver_consistent():
    d = _chain_deriver(6, [(1, 6), (4, 6)])
    assert d.derive_all() is None and d.check_edges() is None


def test_realizability_status():
    c25 = builtin("closure-25")
    s = schutte_33()
    order = list(c25.rays) + [r for r in s.rays if r not in set(c25.rays)]
    g = orthogonality_graph(order)
    r = realizability_status(g, c25)
    assert r.status == "realized" and r.faithful
    assert r.rays == RaySet(order)
    with pytest.raises(GeometryError):
        realizability_status(g, builtin("yu-oh-13"))


def _units(cnf, lits):
    for l in lits:
        cnf.add([l])


def test_geometry_hook_emits_chain_clause():
    n = 7
    enc = encode(n, BaseFixing(orthogonality_graph(CHAIN_BASE)), EncodeOptions.trivial())
    cnf = enc.cnf
    chain = [edge_var(1, 6), edge_var(4, 6), edge_var(4, 7), edge_var(6, 7)]
    _units(cnf, chain + [-edge_var(i, 7) for i in (1, 2, 3, 5)])
    rec = ProofRecorder()
    res = Solver(cnf, [GeometryHook(n, CHAIN_BASE)], proof=rec).solve()
    assert res.status == "UNSAT"
    olines = [l for l in rec.lines if l.startswith("o ")]
    assert olines[0] == "o " + " ".join(str(-v) for v in sorted(chain, reverse=True)) + \
        " 0 6 1 6 4 7 4 7 6 0\n"
    assert verify(cnf, rec.lines, base=CHAIN_BASE).ok
