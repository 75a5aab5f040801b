import json
import random
from itertools import combinations, product
from pathlib import Path

import pytest

from ksgen.bench import (build_dataset, chromatic_number, gen_dataset, has_k4, is_k_colorable,
                         load_dataset, passes_filters, run_bench, save_dataset, summarize,
                         time_instance, write_csv, write_summary_csv, write_svg)
from ksgen.canon import lex_check
from ksgen.graph import Graph, Permutation, apply_perm

DATASET = Path(__file__).resolve().parents[1] / "datasets" / "bench"

C5 = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
# Mycielski graph of C5: triangle-free with chromatic number 4
GROTZSCH = Graph(11, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5),
                      (6, 2), (6, 5), (7, 1), (7, 3), (8, 2), (8, 4), (9, 3), (9, 5), (10, 1), (10, 4),
                      (11, 6), (11, 7), (11, 8), (11, 9), (11, 10)])


def brute_colorable(g, k):
    for cols in product(range(k), repeat=g.n):
        if all(cols[i - 1] != cols[j - 1] for i, j in g.edges()):
            return True
    return False


def test_chromatic_numbers():
    assert chromatic_number(Graph(3)) == 1
    assert chromatic_number(C5) == 3
    assert chromatic_number(Graph.complete(4)) == 4
    assert chromatic_number(GROTZSCH) == 4


def test_colorability_against_brute_force():
    rng = random.Random(51)
    for _ in range(150):
        n = rng.randint(1, 8)
        g = Graph(n, [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.5])
        for k in (2, 3):
            assert is_k_colorable(g, k) == brute_colorable(g, k)


def test_filters():
    assert has_k4(Graph.complete(4)) and not has_k4(C5)
    assert not passes_filters(GROTZSCH)  # no triangle
    assert not passes_filters(Graph.complete(4))
    # C5 joined to a new vertex (the 5-wheel): K4-free, has triangles, chromatic number 4
    wheel = C5.add_vertex(range(1, 6))
    assert passes_filters(wheel)


def test_gen_dataset_deterministic():
    a = gen_dataset(12, 4, seed=3)
    b = gen_dataset(12, 4, seed=3)
    assert a == b
    assert all(passes_filters(g) for g in a)
    assert len(set(a)) == 4


def test_time_instance_needs_lex_least():
    g = build_dataset([12], 1, seed=1)[12][0]
    rec = time_instance(g, 0, repeats=1)
    assert rec.lex_ms > 0 and rec.rcl_ms > 0 and not rec.lex_censored
    worse = apply_perm(g, Permutation(range(12, 0, -1)))
    assert not lex_check(worse).is_minimal
    with pytest.raises(ValueError):
        time_instance(worse, 0, repeats=1)


def test_outputs(tmp_path):
    data = build_dataset([12, 13], 2, seed=2)
    recs = run_bench(data, repeats=1)
    rows = summarize(recs)
    assert [r["n"] for r in rows] == [12, 13]
    write_csv(tmp_path / "raw.csv", recs)
    write_summary_csv(tmp_path / "summary.csv", rows)
    write_svg(tmp_path / "trend.svg", rows)
    assert (tmp_path / "raw.csv").read_text().splitlines()[0] == "n,id,lex_ms,rcl_ms,lex_censored"
    assert (tmp_path / "trend.svg").read_text().lstrip().startswith("<?xml")
    save_dataset(tmp_path / "ds", data, seed=2)
    assert load_dataset(tmp_path / "ds") == data


def test_shipped_dataset():
    manifest = json.loads((DATASET / "manifest.json").read_text())
    assert manifest["seed"] == 0
    data = load_dataset(DATASET)
    assert sorted(data) == list(range(12, 19))
    for n, gs in data.items():
        assert len(gs) == 50 and len(set(gs)) == 50
        assert all(g.n == n for g in gs)
    for g in data[12] + data[13]:
        assert passes_filters(g)
        assert lex_check(g).is_minimal


def test_shipped_dataset_reproducible():
    assert build_dataset([12], 50, seed=0)[12] == load_dataset(DATASET)[12]
