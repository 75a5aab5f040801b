"""Lex-least versus RCL canonicity-check benchmark.

Dataset graphs are connected, contain a triangle, are K4-free and have
chromatic number exactly 4.  Each is lex-canonized before timing, so both
checkers see the same, lex-least input.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

from .canon import LexTimeout, is_rcl_canonical, lex_canonize, lex_check
from .graph import Graph, read_graph6_file, write_graph6_file


def is_k_colorable(g: Graph, k: int) -> bool:
    """Backtracking with a most-constrained-vertex order."""
    n = g.n
    rows = g.rows
    color = [-1] * n
    full = (1 << k) - 1

    def avail(v):
        used = 0
        r = rows[v]
        while r:
            u = (r & -r).bit_length() - 1
            r &= r - 1
            if color[u] >= 0:
                used |= 1 << color[u]
        return full & ~used

    def rec(done):
        if done == n:
            return True
        best, best_opts, best_deg = -1, None, -1
        for v in range(n):
            if color[v] < 0:
                a = avail(v)
                c = bin(a).count("1")
                if c == 0:
                    return False
                deg = bin(rows[v]).count("1")
                if best < 0 or c < bin(best_opts).count("1") or (c == bin(best_opts).count("1") and deg > best_deg):
                    best, best_opts, best_deg = v, a, deg
        # symmetry: never open more than one new color at a time
        top = max(color) + 1
        a = best_opts & ((1 << min(top + 1, k)) - 1)
        while a:
            c = (a & -a).bit_length() - 1
            a &= a - 1
            color[best] = c
            if rec(done + 1):
                return True
        color[best] = -1
        return False

    return rec(0)


def chromatic_number(g: Graph) -> int:
    k = 1 if g.num_edges() == 0 else 2
    while not is_k_colorable(g, k):
        k += 1
    return k


def has_k4(g: Graph) -> bool:
    rows = g.rows
    for a, b in combinations(range(g.n), 2):
        if rows[a] >> b & 1:
            common = rows[a] & rows[b]
            c = common
            while c:
                x = (c & -c).bit_length() - 1
                c &= c - 1
                if rows[x] & common:
                    return True
    return False


def passes_filters(g: Graph) -> bool:
    return (g.is_connected() and bool(g.triangles()) and not has_k4(g)
            and chromatic_number(g) == 4)


def _random_candidate(n: int, rng: random.Random) -> Graph:
    """Add random edges that keep the graph K4-free until it is not 3-colorable."""
    rows = [0] * n
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    g = Graph._from_rows(rows)
    for a, b in pairs:
        common = rows[a] & rows[b]
        c = common
        clash = False
        while c:
            x = (c & -c).bit_length() - 1
            c &= c - 1
            if rows[x] & common:
                clash = True
                break
        if clash:
            continue
        rows[a] |= 1 << b
        rows[b] |= 1 << a
        g = Graph._from_rows(rows)
        if not is_k_colorable(g, 3):
            return g
    return g


def gen_dataset(n: int, count: int, seed: int = 0, max_attempts: Optional[int] = None) -> list[Graph]:
    rng = random.Random(f"{seed}:{n}")
    out = []
    seen = set()
    attempts = 0
    limit = max_attempts or 200 * count
    while len(out) < count and attempts < limit:
        attempts += 1
        g = _random_candidate(n, rng)
        if passes_filters(g) and g not in seen:
            seen.add(g)
            out.append(g)
    if len(out) < count:
        raise RuntimeError(f"n={n}: only {len(out)} of {count} graphs after {attempts} attempts")
    return out


@dataclass
class BenchRecord:
    n: int
    id: int
    lex_ms: float
    rcl_ms: float
    lex_censored: bool = False
    rcl_verdict: bool = False


def _median_time(fn, repeats: int = 3) -> tuple[float, object]:
    out = fn()  # warmup
    ts = []
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t)
    return statistics.median(ts) * 1000.0, out


def time_instance(g: Graph, n_id: int, lex_budget: float = 60.0, repeats: int = 3) -> BenchRecord:
    lex_ms, res = _median_time(lambda: lex_check(g, budget=lex_budget), repeats)
    censored = res.timed_out
    if not censored and not res.is_minimal:
        raise ValueError(f"instance {n_id} is not lex-least; canonize the dataset first")
    rcl_ms, verdict = _median_time(lambda: is_rcl_canonical(g)[0], repeats)
    return BenchRecord(g.n, n_id, lex_ms, rcl_ms, censored, verdict)


def run_bench(dataset: dict[int, Sequence[Graph]], lex_budget: float = 60.0,
              repeats: int = 3, progress=None) -> list[BenchRecord]:
    recs = []
    for n in sorted(dataset):
        for i, g in enumerate(dataset[n]):
            recs.append(time_instance(g, i, lex_budget, repeats))
            if progress:
                progress(recs[-1])
    return recs


def summarize(recs: Sequence[BenchRecord]) -> list[dict]:
    rows = []
    for n in sorted({r.n for r in recs}):
        rs = [r for r in recs if r.n == n]
        lex = [r.lex_ms for r in rs]
        rcl = [r.rcl_ms for r in rs]
        rows.append(dict(
            n=n, count=len(rs),
            lex_avg_ms=statistics.fmean(lex), lex_median_ms=statistics.median(lex),
            lex_total_ms=sum(lex), lex_censored=sum(r.lex_censored for r in rs),
            rcl_avg_ms=statistics.fmean(rcl), rcl_median_ms=statistics.median(rcl),
            rcl_total_ms=sum(rcl),
            speedup=statistics.fmean(lex) / statistics.fmean(rcl),
        ))
    return rows


def write_csv(path, recs: Sequence[BenchRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "id", "lex_ms", "rcl_ms", "lex_censored"])
        for r in recs:
            w.writerow([r.n, r.id, f"{r.lex_ms:.4f}", f"{r.rcl_ms:.4f}", int(r.lex_censored)])


def write_summary_csv(path, rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in row.items()})


def write_svg(path, rows: Sequence[dict]) -> None:
    """Median check time per order on a log scale."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, [r["lex_median_ms"] for r in rows], "o-", label="lex-least check")
    ax.plot(ns, [r["rcl_median_ms"] for r in rows], "s-", label="RCL check")
    ax.set_yscale("log")
    ax.set_xlabel("order n")
    ax.set_ylabel("median time per graph (ms)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# -- dataset files ----------------------------------------------------------------


def canonize_dataset(graphs: Sequence[Graph], budget: Optional[float] = None) -> list[Graph]:
    return [lex_canonize(g, budget) for g in graphs]


def save_dataset(directory, dataset: dict[int, Sequence[Graph]], seed: int) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest = {"seed": seed, "generator": "ksgen.bench.gen_dataset", "canonized": "lex-least",
                "orders": {}}
    for n, gs in sorted(dataset.items()):
        name = f"n{n}.g6"
        write_graph6_file(d / name, gs)
        manifest["orders"][str(n)] = {"file": name, "count": len(gs)}
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_dataset(directory) -> dict[int, list[Graph]]:
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    return {int(n): read_graph6_file(d / e["file"]) for n, e in manifest["orders"].items()}


def build_dataset(orders: Sequence[int], count: int, seed: int = 0,
                  budget: Optional[float] = None) -> dict[int, list[Graph]]:
    out = {}
    for n in orders:
        raw = gen_dataset(n, count, seed)
        try:
            out[n] = canonize_dataset(raw, budget)
        except LexTimeout as e:
            raise RuntimeError(f"lex canonization timed out at n={n}") from e
    return out
