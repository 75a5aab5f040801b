"""CNF encoding of Kochen-Specker candidate graphs and 010-colorability.

Variable layout for order ``n``:

* ``1 .. C(n,2)``: edge variables in column-major order (see ``EdgeVarMap``)
* next ``C(n,3)``: triangle variables ``t_{i,j,k}``, colex order
* the rest: sequential-counter auxiliaries for the minimum-degree constraint
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .graph import EdgeVarMap, Graph
from .sat import Cnf, ExternalClause, Propagator

EAGER_MAX_N = 16


class EncodingError(ValueError):
    pass


class TriangleVarMap:
    """Colex numbering of triples, placed right after the edge variables."""

    def __init__(self, n: int):
        self.n = n
        self.offset = comb(n, 2)
        self.num_vars = comb(n, 3)

    def var(self, i: int, j: int, k: int) -> int:
        i, j, k = sorted((i, j, k))
        if i < 1 or i == j or j == k or k > self.n:
            raise ValueError(f"no triangle variable for ({i},{j},{k}) with n={self.n}")
        return self.offset + comb(k - 1, 3) + comb(j - 1, 2) + (i - 1) + 1

    __call__ = var

    def triple(self, var: int) -> tuple[int, int, int]:
        r = var - self.offset - 1
        if not 0 <= r < self.num_vars:
            raise ValueError(f"variable {var} is not a triangle variable")
        k = 3
        while comb(k, 3) <= r:
            k += 1
        r -= comb(k - 1, 3)
        j = 2
        while comb(j, 2) <= r:
            j += 1
        r -= comb(j - 1, 2)
        return r + 1, j, k

    def triples(self):
        for k in range(3, self.n + 1):
            for j in range(2, k):
                for i in range(1, j):
                    yield i, j, k


@dataclass(frozen=True)
class Coloring010:
    one_set: frozenset


def is_010_coloring(g: Graph, one_set) -> bool:
    ones = 0
    for v in one_set:
        ones |= 1 << (v - 1)
    for v in one_set:
        if g.rows[v - 1] & ones:
            return False
    for a, b, c in g.triangles():
        if not (ones >> (a - 1) & 1 or ones >> (b - 1) & 1 or ones >> (c - 1) & 1):
            return False
    return True


def check_010(g: Graph) -> Optional[Coloring010]:
    """A 010-coloring of ``g`` or ``None`` if there is none.

    Backtracking over the one-set: pick the triangle with the fewest
    still-allowed vertices that has no 1 yet and branch on which vertex
    carries its 1.  Neighbours of a 1 are forced to 0, which also enforces
    "at most one 1 per triangle".
    """
    rows = g.rows
    tris = [(1 << (a - 1)) | (1 << (b - 1)) | (1 << (c - 1)) for a, b, c in g.triangles()]

    def rec(ones: int, banned: int) -> Optional[int]:
        best = None
        best_opts = 4
        for t in tris:
            if t & ones:
                continue
            opts = t & ~banned
            c = bin(opts).count("1")
            if c < best_opts:
                best, best_opts = opts, c
                if c == 0:
                    return None
        if best is None:
            return ones
        opts = best
        while opts:
            low = opts & -opts
            opts ^= low
            v = low.bit_length() - 1
            res = rec(ones | low, banned | rows[v] | low)
            if res is not None:
                return res
            banned |= low
        return None

    res = rec(0, 0)
    if res is None:
        return None
    return Coloring010(frozenset(v + 1 for v in range(g.n) if res >> v & 1))


@dataclass
class BaseFixing:
    graph: Graph

    @property
    def p(self) -> int:
        return self.graph.n

    def unit_clauses(self) -> list[list[int]]:
        ev = EdgeVarMap(self.p)
        return [[ev(i, j) if self.graph.has_edge(i, j) else -ev(i, j)] for i, j in ev.pairs()]


@dataclass
class EncodeOptions:
    squarefree: bool = True
    min_degree: bool = True
    triangle_membership: bool = True
    eager_010: bool = True

    @classmethod
    def structure_only(cls) -> "EncodeOptions":
        return cls(eager_010=False)

    @classmethod
    def trivial(cls) -> "EncodeOptions":
        return cls(False, False, False, False)


@dataclass
class Encoding:
    n: int
    cnf: Cnf
    num_edge_vars: int
    triangle_range: tuple[int, int]
    aux_range: tuple[int, int]
    base: Optional[BaseFixing] = None
    options: EncodeOptions = field(default_factory=EncodeOptions)

    def graph_of(self, model: Sequence[int]) -> Graph:
        return graph_from_model(self.n, model)


def graph_from_model(n: int, model: Sequence[int]) -> Graph:
    ev = EdgeVarMap(n)
    return Graph(n, [ev.pair(v) for v in range(1, ev.num_vars + 1) if model[v - 1] > 0])


def has_c4(g: Graph) -> Optional[tuple[int, int]]:
    """Two vertices with at least two common neighbours, if any."""
    rows = g.rows
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if bin(rows[i] & rows[j]).count("1") >= 2:
                return i + 1, j + 1
    return None


def squarefree_clauses(n: int) -> list[list[int]]:
    ev = EdgeVarMap(n)
    out = []
    for a, b, c, d in combinations(range(1, n + 1), 4):
        # the three 4-cycles on {a,b,c,d}: a-x-b-y-a with {x,y} the other pair
        for (i, j), (k, l) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
            out.append([-ev(i, k), -ev(j, k), -ev(i, l), -ev(j, l)])
    return out


def triangle_definitions(n: int) -> list[list[int]]:
    ev, tv = EdgeVarMap(n), TriangleVarMap(n)
    out = []
    for i, j, k in tv.triples():
        t = tv(i, j, k)
        a, b, c = ev(i, j), ev(i, k), ev(j, k)
        out += [[-t, a], [-t, b], [-t, c], [t, -a, -b, -c]]
    return out


def triangle_membership_clauses(n: int) -> list[list[int]]:
    tv = TriangleVarMap(n)
    return [[tv(*t) for t in tv.triples() if v in t] for v in range(1, n + 1)]


def at_least_k(xs: Sequence[int], k: int, next_var: int) -> tuple[list[list[int]], int]:
    """Sequential counter forcing at least ``k`` of ``xs`` true.

    ``s[i][c]`` means "at least c of xs[:i+1] are true"; the clauses only
    push that information downward, which is all an at-least constraint
    needs.  Returns the clauses and the next free variable.
    """
    m = len(xs)
    if k <= 0:
        return [], next_var
    if m < k:
        return [[]], next_var
    s = []
    clauses = []
    for i in range(m):
        row = {}
        for c in range(1, min(k, i + 1) + 1):
            row[c] = next_var
            next_var += 1
        s.append(row)
    for i in range(m):
        for c, var in s[i].items():
            prev_c = s[i - 1].get(c) if i > 0 else None
            clauses.append([-var, xs[i]] + ([prev_c] if prev_c else []))
            if c > 1:
                clauses.append([-var] + ([prev_c] if prev_c else []) + [s[i - 1][c - 1]])
    clauses.append([s[m - 1][k]])
    return clauses, next_var


def eager_010_clauses(n: int) -> list[list[int]]:
    """Rule out every small one-set ``|A| < ceil(n/2)``.

    Each clause says: some edge lies inside ``A`` or some triangle avoids
    ``A``.  A subset with no possible witness gives an empty body and is
    skipped.
    """
    if n < 3:
        raise ValueError("eager 010 clauses need n >= 3")
    if n > EAGER_MAX_N:
        raise ValueError(f"eager 010 clauses refused for n={n} > {EAGER_MAX_N}; use the lazy hook")
    ev, tv = EdgeVarMap(n), TriangleVarMap(n)
    limit = (n + 1) // 2
    triples = list(tv.triples())
    out = []
    for size in range(limit):
        for a in combinations(range(1, n + 1), size):
            sa = set(a)
            body = [ev(i, j) for i, j in combinations(a, 2)]
            body += [tv(*t) for t in triples if sa.isdisjoint(t)]
            if body:
                out.append(body)
    return out


def encode(n: int, base: Optional[BaseFixing] = None,
           options: Optional[EncodeOptions] = None) -> Encoding:
    opts = options or EncodeOptions()
    if base is not None:
        if base.p > n:
            raise EncodingError(f"base order {base.p} exceeds target order {n}")
        if opts.squarefree:
            bad = has_c4(base.graph)
            if bad:
                raise EncodingError(
                    f"base violates squarefree: vertices {bad[0]} and {bad[1]} share two neighbours")
    ne = comb(n, 2)
    need_tri = opts.triangle_membership or (opts.eager_010 and n <= EAGER_MAX_N and n >= 3)
    nt = comb(n, 3) if need_tri else 0
    clauses: list[list[int]] = []
    if need_tri:
        clauses += triangle_definitions(n)
    if opts.squarefree:
        clauses += squarefree_clauses(n)
    if opts.triangle_membership:
        clauses += triangle_membership_clauses(n)
    if opts.eager_010 and 3 <= n <= EAGER_MAX_N:
        clauses += eager_010_clauses(n)
    next_var = ne + nt + 1
    if opts.min_degree:
        ev = EdgeVarMap(n)
        for v in range(1, n + 1):
            xs = [ev(v, u) for u in range(1, n + 1) if u != v]
            cl, next_var = at_least_k(xs, 3, next_var)
            clauses += cl
    if base is not None:
        clauses += base.unit_clauses()
    if any(not c for c in clauses):
        # a constraint with no way to be satisfied; keep the CNF well formed
        clauses = [c for c in clauses if c]
        next_var += 1
        clauses += [[next_var - 1], [-(next_var - 1)]]
    nv = next_var - 1
    comments = [
        f"order {n}",
        f"edge vars 1..{ne}",
        f"triangle vars {ne + 1}..{ne + nt}",
        f"aux vars {ne + nt + 1}..{nv}",
        f"base order {base.p if base else 0}",
        "options " + " ".join(f"{k}={int(v)}" for k, v in vars(opts).items()),
    ]
    cnf = Cnf(max(nv, ne), clauses, comments)
    return Encoding(n, cnf, ne, (ne + 1, ne + nt), (ne + nt + 1, nv), base, opts)


class Lazy010Hook(Propagator):
    """Rejects final models whose graph has a 010-coloring."""

    observed = ()

    def __init__(self, n: int):
        self.n = n
        self.blocked = 0

    def on_final_model(self, model):
        g = graph_from_model(self.n, model)
        if check_010(g) is None:
            return None
        self.blocked += 1
        m = comb(self.n, 2)
        return ExternalClause([-v if model[v - 1] > 0 else v for v in range(1, m + 1)], "add")
