"""From the 13 Yu-Oh rays to the 25-ray closure and the 33-ray Schuette set.

Run:  python3 demos/closure_and_schutte.py
"""
from ksgen.encode import check_010
from ksgen.geom import builtin, closure, orthogonality_graph, schutte_33

yu_oh = builtin("yu-oh-13")
c25 = closure(yu_oh)
print(f"Yu-Oh rays: {len(yu_oh)}, after orthogonal closure: {len(c25)}")

# closing again adds nothing
assert closure(c25) == c25

s33 = schutte_33()
extra = sorted(set(s33.rays) - set(c25.rays))
print(f"Schuette-33 adds {len(extra)} rays to the closure:")
for r in extra:
    print("   ", r)

g25 = orthogonality_graph(c25)
g33 = orthogonality_graph(s33)
print(f"orthogonality graphs: {g25.num_edges()} edges on 25 vertices, "
      f"{g33.num_edges()} edges on 33 vertices")

# the 25-ray structure still has a 010-coloring; the full set does not
col = check_010(g25)
print("closure-25 010-colorable, rays coloured 1:", sorted(col.one_set))
print("schutte-33 010-colorable:", check_010(g33) is not None)
