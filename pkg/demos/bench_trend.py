"""A quick look at the canonicity-check benchmark.

Times the lex-least check and the RCL check on the first few shipped
dataset graphs of each order.  The full run is ``ksgen bench``.

Run:  python3 demos/bench_trend.py [per_order]
"""
import sys
from pathlib import Path

from ksgen.bench import load_dataset, run_bench, summarize

per_order = int(sys.argv[1]) if len(sys.argv) > 1 else 5
data = load_dataset(Path(__file__).resolve().parents[1] / "datasets" / "bench")
subset = {n: gs[:per_order] for n, gs in data.items()}

rows = summarize(run_bench(subset, lex_budget=30.0, repeats=1,
                           progress=lambda r: print(".", end="", flush=True)))
print()
print(" n   lex median ms   rcl median ms   lex/rcl")
for r in rows:
    print(f"{r['n']:2d}  {r['lex_median_ms']:14.1f}  {r['rcl_median_ms']:14.1f}  "
          f"{r['lex_median_ms'] / r['rcl_median_ms']:8.1f}")
