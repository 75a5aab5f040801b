import random
from math import comb

import pytest

import oracles
from ksgen.canon import is_rcl_canonical
from ksgen.encode import EncodeOptions
from ksgen.geom import builtin, orthogonality_graph
from ksgen.graph import Graph
from ksgen.proof import ProofRecorder, verify
from ksgen.search import (PrefixTracker, SearchConfig, get_complete_prefix, make_cubes,
                          prepare_base, read_cubes, run_search, write_cubes)

TRIVIAL_COUNTS = [1, 2, 4, 11, 34, 156, 1044]


def trivial_cfg(n, **kw):
    kw.setdefault("geometry", False)
    kw.setdefault("lazy010", False)
    return SearchConfig(n, options=EncodeOptions.trivial(), **kw)


def test_get_complete_prefix():
    assert get_complete_prefix([]) == 1
    assert get_complete_prefix([1]) == 2
    assert get_complete_prefix([1, -2]) == 2
    assert get_complete_prefix([1, -2, 3]) == 3
    assert get_complete_prefix([1, 2, 3, 4, 5, 6], n=4) == 4
    assert get_complete_prefix([2, 3, 4]) == 1


def test_prefix_tracker_matches_scan():
    rng = random.Random(41)
    n = 7
    m = comb(n, 2)
    for _ in range(200):
        t = PrefixTracker(n)
        assigned = []
        for level in range(1, 8):
            for v in rng.sample(range(1, m + 1), 3):
                if v not in [a for a, _ in assigned]:
                    t.assign(v, level)
                    assigned.append((v, level))
            assert t.k() == get_complete_prefix([a for a, _ in assigned], n)
            if rng.random() < 0.3:
                back = rng.randint(0, level)
                t.backtrack(back)
                assigned = [(a, l) for a, l in assigned if l <= back]
                assert t.k() == get_complete_prefix([a for a, _ in assigned], n)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("decision", ["static-prefix", "activity"])
def test_trivial_counts(n, decision):
    rec = ProofRecorder()
    res = run_search(trivial_cfg(n, decision=decision, proof=rec))
    assert res.exhaustive
    assert len(res.graphs) == TRIVIAL_COUNTS[n - 1]
    assert len({oracles.min_code(g) for g in res.graphs}) == len(res.graphs)
    assert all(is_rcl_canonical(g)[0] for g in res.graphs)
    v = verify(res.cnf, rec.lines, results=res.graphs)
    assert v.ok, str(v)


def test_unpruned_search_lists_every_labeled_graph():
    res = run_search(trivial_cfg(4, rcl=False))
    assert len(res.graphs) == 2 ** 6
    assert len({oracles.min_code(g) for g in res.graphs}) == 11


def test_cubes_partition_the_search():
    n = 5
    total = []
    for cube in make_cubes(n, 3):
        res = run_search(trivial_cfg(n, cube=cube))
        assert res.exhaustive
        total += res.graphs
    # cubes split the labeled space, so RCL keeps one graph per class per cube
    assert len(set(total)) == len(total)
    assert {oracles.min_code(g) for g in total} == set(oracles.iso_class_codes(n))


def test_make_cubes():
    cubes = make_cubes(6, 2, base_order=3)
    assert cubes == [[-4, -5], [-4, 5], [4, -5], [4, 5]]
    with pytest.raises(ValueError):
        make_cubes(4, 7)


def test_cube_files(tmp_path):
    p = tmp_path / "c.txt"
    write_cubes(p, [[1, -2], [3]])
    assert read_cubes(p) == [[1, -2], [3]]
    p.write_text("1 2\n")
    with pytest.raises(ValueError):
        read_cubes(p)


def test_prepare_base():
    rays = builtin("yu-oh-13")
    g, r = prepare_base(None, rays)
    assert is_rcl_canonical(g)[0]
    assert orthogonality_graph(r) == g
    with pytest.raises(ValueError):
        prepare_base(Graph(13), rays)
    assert prepare_base(None, None) == (None, None)


def test_geometry_needs_rays():
    with pytest.raises(ValueError):
        run_search(SearchConfig(5, geometry=True))


def test_budget_gives_indeterminate():
    res = run_search(trivial_cfg(6, max_conflicts=1))
    assert not res.exhaustive
    assert res.status == "indeterminate"
