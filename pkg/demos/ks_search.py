"""Search for KS candidates extending the 25-ray closure, with a checked proof.

Every order from 26 to 28 finishes with no candidates: the geometric
propagator and the 010 constraints refute every extension.

Run:  python3 demos/ks_search.py [max_order]
"""
import sys
import time

from ksgen.geom import builtin
from ksgen.proof import ProofRecorder, verify
from ksgen.search import SearchConfig, prepare_base, run_search

top = int(sys.argv[1]) if len(sys.argv) > 1 else 28
base_graph, base_rays = prepare_base(None, builtin("closure-25"))

for order in range(26, top + 1):
    rec = ProofRecorder()
    t = time.perf_counter()
    res = run_search(SearchConfig(order, base_graph=base_graph, base_rays=base_rays, proof=rec))
    dt = time.perf_counter() - t
    kinds = {}
    for line in rec.lines:
        k = line[0] if line[0] in "dto" else "add"
        kinds[k] = kinds.get(k, 0) + 1
    v = verify(res.cnf, rec.lines, base=base_rays, results=res.graphs)
    print(f"order {order}: {len(res.graphs)} candidates, {res.status}, {dt:.1f}s")
    print(f"   proof lines {kinds}, verifier: {'accept' if v.ok else v}")
