"""Regenerate the shipped benchmark dataset under datasets/bench.

50 graphs per order 12..18, seed 0, each lex-canonized.
"""

import sys
import time
from pathlib import Path

from ksgen.bench import build_dataset, save_dataset

OUT = Path(__file__).resolve().parents[1] / "datasets" / "bench"
ORDERS = range(12, 19)
COUNT = 50
SEED = 0


def main():
    data = {}
    for n in ORDERS:
        t = time.perf_counter()
        data.update(build_dataset([n], COUNT, SEED))
        print(f"n={n}: {COUNT} graphs in {time.perf_counter() - t:.1f}s", flush=True)
    save_dataset(OUT, data, SEED)
    print("wrote", OUT)


if __name__ == "__main__":
    sys.exit(main())
