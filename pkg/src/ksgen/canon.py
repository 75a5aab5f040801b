"""Canonical labeling.

``base_canon``
    individualization-refinement with 1-dimensional color refinement and
    automorphism pruning; the canonical leaf is the one with the smallest
    column-major adjacency string.
``oracle_canon``
    brute force over all ``n!`` relabelings (``n <= 8``), used as a test oracle.
``rcl_canon`` / ``is_rcl_canonical``
    the hereditary recursive wrapper around ``base_canon``.
``lex_check`` / ``lex_canonize``
    lex-least canonicity by branch-and-bound over partial permutations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb
from typing import Optional

import numpy as np

from .graph import Graph, Permutation, apply_perm

ORACLE_MAX_N = 8


@dataclass(frozen=True)
class CanonResult:
    canonical_graph: Graph
    labeling: Permutation  # input label -> canonical label


@dataclass(frozen=True)
class LexCheckResult:
    status: str  # "minimal" | "not-minimal" | "timeout"
    witness: Optional[Permutation] = None
    nodes: int = 0

    @property
    def is_minimal(self) -> bool:
        return self.status == "minimal"

    @property
    def timed_out(self) -> bool:
        return self.status == "timeout"


class LexTimeout(Exception):
    """Raised by ``lex_canonize`` when the budget runs out; carries the partial graph."""

    def __init__(self, partial: Graph, steps: int):
        super().__init__(f"lex canonization budget exceeded after {steps} steps")
        self.partial = partial
        self.steps = steps


# -- individualization-refinement --------------------------------------------


@lru_cache(maxsize=64)
def _colmajor_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = [], []
    for j in range(1, n):
        for i in range(j):
            iu.append(i)
            ju.append(j)
    return np.array(iu, dtype=np.intp), np.array(ju, dtype=np.intp)


_WEIGHTS = np.random.default_rng(20240611).integers(1, 2**62, size=4096, dtype=np.int64)


def _refine(a: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """Color refinement; colors are ranks and stay isomorphism-invariant.

    Each round a vertex's new color is determined by its old color and a
    hash of the multiset of its neighbours' colors (a random-weight sum).
    A hash collision could only merge cells, which keeps the result
    invariant, so it cannot break canonicity.
    """
    n = len(colors)
    c = int(colors.max()) + 1
    while c < n:
        h = a @ _WEIGHTS[colors]
        keys = (colors.astype(np.int64) << 32) | (h & 0xFFFFFFFF)
        _, colors = np.unique(keys, return_inverse=True)
        c2 = int(colors.max()) + 1
        if c2 == c:
            break
        c = c2
    return colors


def _individualize(a: np.ndarray, colors: np.ndarray, v: int) -> np.ndarray:
    c = colors * 2 + 1
    c[v] -= 1
    _, ranks = np.unique(c, return_inverse=True)
    return _refine(a, ranks.reshape(-1))


def _target_cell(colors: np.ndarray) -> Optional[np.ndarray]:
    counts = np.bincount(colors)
    big = counts.max()
    if big <= 1:
        return None
    color = int(np.flatnonzero(counts == big)[0])
    return np.flatnonzero(colors == color)


class _IRSearch:
    def __init__(self, a: np.ndarray):
        self.a = a
        self.n = a.shape[0]
        self.iu, self.ju = _colmajor_index(self.n)
        self.first = None  # (sequence, colors, cert)
        self.best = None
        self.autos: list[np.ndarray] = []
        self.leaves = 0

    def _cert(self, colors: np.ndarray) -> bytes:
        order = np.argsort(colors)
        b = self.a[np.ix_(order, order)]
        return np.packbits(b[self.iu, self.ju] > 0).tobytes()

    def _leaf(self, seq, colors) -> Optional[int]:
        """Process a discrete partition; returns a backjump depth or None."""
        self.leaves += 1
        cert = self._cert(colors)
        if self.first is None:
            self.first = self.best = (list(seq), colors, cert)
            return None
        for ref in (self.first, self.best):
            if cert == ref[2]:
                # automorphism: vertex x -> vertex holding x's rank in the reference leaf
                inv_ref = np.empty(self.n, dtype=np.intp)
                inv_ref[ref[1]] = np.arange(self.n)
                self.autos.append(inv_ref[colors])
                d = 0
                for x, y in zip(ref[0], seq):
                    if x != y:
                        break
                    d += 1
                return d
        if cert < self.best[2]:
            self.best = (list(seq), colors, cert)
        return None

    def run(self, init: Optional[np.ndarray] = None) -> np.ndarray:
        start = np.zeros(self.n, dtype=np.intp) if init is None else init
        colors = _refine(self.a, start)
        self._dfs(colors, [])
        return self.best[1]

    def _dfs(self, colors, seq) -> Optional[int]:
        cell = _target_cell(colors)
        if cell is None:
            return self._leaf(seq, colors)
        depth = len(seq)
        explored: list[int] = []
        orbits = None
        n_autos = -1
        for w in cell.tolist():
            if explored and self.autos:
                if n_autos != len(self.autos):
                    n_autos = len(self.autos)
                    orbits = self._orbits(seq)
                if orbits is not None and any(orbits[e] == orbits[w] for e in explored):
                    continue
            explored.append(w)
            seq.append(w)
            jump = self._dfs(_individualize(self.a, colors, w), seq)
            seq.pop()
            if jump is not None and jump < depth:
                return jump
        return None

    def _orbits(self, seq) -> Optional[np.ndarray]:
        """Orbit labels of the automorphisms found so far that fix ``seq`` pointwise."""
        gens = [g for g in self.autos if all(g[x] == x for x in seq)]
        if not gens:
            return None
        lab = np.arange(self.n)
        while True:
            old = lab.copy()
            for g in gens:
                m = np.minimum(lab, lab[g])
                np.minimum.at(m, g, m)
                lab = m
            # pointer jumping to the smallest label in each component
            lab = lab[lab]
            if np.array_equal(lab, old):
                return lab


def _canon(g: Graph, marked=None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Canonical ranks (0-based, vertex -> rank) and automorphism generators.

    ``marked`` is an optional set of 0-based vertices forming a second color
    class; marked vertices come after unmarked ones.
    """
    if g.n == 1:
        return np.zeros(1, dtype=np.intp), []
    init = None
    if marked is not None:
        init = np.zeros(g.n, dtype=np.intp)
        init[list(marked)] = 1
        if not init.any() or init.all():
            init = None
    search = _IRSearch(g.matrix().astype(np.int64))
    colors = search.run(init)
    return colors, search.autos


def base_canon(g: Graph) -> CanonResult:
    """Canonical labeling by individualization-refinement."""
    colors, _ = _canon(g)
    lab = Permutation((colors + 1).tolist())
    return CanonResult(apply_perm(g, lab), lab)


def automorphism_generators(g: Graph) -> list[Permutation]:
    """Generators of Aut(g) found during the canonical search."""
    _, autos = _canon(g)
    return [Permutation((x + 1).tolist()) for x in autos]


# -- brute-force oracle -------------------------------------------------------


@lru_cache(maxsize=None)
def _all_perms(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int64)


def oracle_canon(g: Graph) -> CanonResult:
    """Lex-smallest column-major string over all relabelings (``n <= 8``)."""
    n = g.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle_canon refuses n={n} > {ORACLE_MAX_N} (n! cost)")
    if n == 1:
        return CanonResult(g, Permutation.identity(1))
    m = comb(n, 2)
    perms = _all_perms(n)
    codes = np.zeros(len(perms), dtype=np.int64)
    for i, j in g.edges():
        a, b = perms[:, i - 1], perms[:, j - 1]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        idx = hi * (hi - 1) // 2 + lo
        codes += np.left_shift(1, m - 1 - idx)
    best = int(np.argmin(codes))
    lab = Permutation((perms[best] + 1).tolist())
    return CanonResult(apply_perm(g, lab), lab)


# -- recursive canonical labeling ---------------------------------------------


def _cached_canon(g: Graph, cache: Optional[dict]):
    if cache is None:
        return _canon(g)
    hit = cache.get(g)
    if hit is None:
        hit = cache[g] = _canon(g)
    return hit


def rcl_canon(g: Graph, cache: Optional[dict] = None) -> CanonResult:
    """Hereditary canonical labeling.

    Top-down, the vertex that the base canonizer labels last is removed until
    one vertex is left.  Bottom-up, each removed vertex is re-inserted with
    the next label.  When the graph built so far has automorphisms that move
    the re-inserted vertex's neighborhood, the labeling is twisted by one of
    them so that the neighborhood lands on a canonical member of its orbit;
    without this step the result would depend on the input labeling.

    ``cache`` (graph -> base canonization) only saves work.
    """
    n = g.n
    levels = []
    cur = g
    while cur.n > 1:
        ranks, autos = _cached_canon(cur, cache)
        v = int(np.flatnonzero(ranks == cur.n - 1)[0])
        levels.append((cur, v, autos))
        cur = cur.remove_vertex(v + 1)

    gamma = [0]
    for idx in range(len(levels) - 1, -1, -1):
        gk, v, _ = levels[idx]
        sub_autos = levels[idx + 1][2] if idx + 1 < len(levels) else []
        nbrs = [x if x < v else x - 1 for x in range(gk.n) if gk.rows[v] >> x & 1]
        if sub_autos and _moves_set(sub_autos, nbrs):
            sub = gk.remove_vertex(v + 1)
            gamma = _twist(sub, gamma, nbrs, cache)
        gamma = [gamma[y if y < v else y - 1] if y != v else gk.n - 1
                 for y in range(gk.n)]
    perm = Permutation([x + 1 for x in gamma])
    return CanonResult(apply_perm(g, perm), perm)


def _moves_set(autos, subset) -> bool:
    s = set(subset)
    return any({int(a[x]) for x in s} != s for a in autos)


def _twist(sub: Graph, gamma: list[int], nbrs: list[int], cache) -> list[int]:
    """Relabel ``sub`` so its canonical image carries ``nbrs`` to a canonical set.

    ``gamma`` maps ``sub`` onto its hereditary form ``C``.  With ``beta`` the
    canonical labeling of ``sub`` with ``nbrs`` marked (image ``D``), ``mu``
    the base labeling of ``D`` and ``lam`` the base labeling of ``C``, the
    composite ``lam^-1 . mu . beta`` is another isomorphism onto ``C`` whose
    image of ``nbrs`` depends only on the isomorphism class of the pair.
    """
    c_graph = apply_perm(sub, Permutation([x + 1 for x in gamma]))
    lam, _ = _cached_canon(c_graph, cache)
    beta, _ = _canon(sub, nbrs)
    d_graph = apply_perm(sub, Permutation((beta + 1).tolist()))
    mu, _ = _cached_canon(d_graph, cache)
    lam_inv = np.empty(len(lam), dtype=np.intp)
    lam_inv[lam] = np.arange(len(lam))
    return [int(lam_inv[mu[beta[x]]]) for x in range(sub.n)]


def is_rcl_canonical(g: Graph, cache: Optional[dict] = None) -> tuple[bool, Optional[Permutation]]:
    """``(True, None)`` if ``g`` is its own RCL form, else ``(False, labeling)``."""
    r = rcl_canon(g, cache)
    if r.canonical_graph == g:
        return True, None
    return False, r.labeling


# -- lex-least canonicity -----------------------------------------------------


def _column_targets(g: Graph) -> list[int]:
    rows = g.rows
    out = [0]
    for j in range(1, g.n):
        t = 0
        r = rows[j]
        for i in range(j):
            t = (t << 1) | (r >> i & 1)
        out.append(t)
    return out


def _complete_greedy(rows, n, q, used) -> list[int]:
    """Extend a partial order by repeatedly taking the smallest column."""
    q = list(q)
    used = list(used)
    pat = [0] * n
    for v in range(n):
        p = 0
        for u in q:
            p = (p << 1) | (rows[u] >> v & 1)
        pat[v] = p
    while len(q) < n:
        best = -1
        for v in range(n):
            if not used[v] and (best < 0 or pat[v] < pat[best]):
                best = v
        q.append(best)
        used[best] = True
        for v in range(n):
            pat[v] = (pat[v] << 1) | (rows[best] >> v & 1)
    return q


def lex_check(g: Graph, budget: Optional[float] = None) -> LexCheckResult:
    """Is the column-major adjacency string of ``g`` lex-smallest among relabelings?

    Depth-first search over ``q = p^-1`` one position at a time; column ``j``
    of the relabeled graph is fixed once ``q(1..j)`` is chosen, so a branch
    is cut as soon as that column exceeds the original one, and the search
    stops with a witness as soon as one is smaller.
    """
    n = g.n
    rows = g.rows
    target = _column_targets(g)
    deadline = None if budget is None else time.perf_counter() + budget
    nodes = 0

    q: list[int] = []
    used = [False] * n
    # stack frames: (candidate list, next index, patterns for this depth)
    pat0 = [0] * n
    stack = [(list(range(n)), 0, pat0)]
    while stack:
        cands, idx, pat = stack[-1]
        if idx >= len(cands):
            stack.pop()
            if q:
                used[q.pop()] = False
            continue
        stack[-1] = (cands, idx + 1, pat)
        v = cands[idx]
        nodes += 1
        if deadline is not None and nodes & 1023 == 0 and time.perf_counter() > deadline:
            return LexCheckResult("timeout", None, nodes)
        q.append(v)
        used[v] = True
        j = len(q)
        if j == n:
            # full tie: this relabeling reproduces g exactly
            used[q.pop()] = False
            continue
        rv = rows[v]
        newpat = [(pat[u] << 1) | (rv >> u & 1) for u in range(n)]
        t = target[j]
        nxt = []
        for u in range(n):
            if used[u]:
                continue
            pu = newpat[u]
            if pu < t:
                order = _complete_greedy(rows, n, q + [u], [used[x] or x == u for x in range(n)])
                image = [0] * n
                for pos, x in enumerate(order, 1):
                    image[x] = pos
                return LexCheckResult("not-minimal", Permutation(image), nodes)
            if pu == t:
                nxt.append(u)
        stack.append((nxt, 0, newpat))
    return LexCheckResult("minimal", None, nodes)


def lex_canonize(g: Graph, budget: Optional[float] = None) -> Graph:
    """Follow improving witnesses until ``g`` is lex-minimal."""
    deadline = None if budget is None else time.perf_counter() + budget
    steps = 0
    while True:
        left = None if deadline is None else max(deadline - time.perf_counter(), 0.0)
        r = lex_check(g, left)
        if r.timed_out:
            raise LexTimeout(g, steps)
        if r.is_minimal:
            return g
        g = apply_perm(g, r.witness)
        steps += 1
