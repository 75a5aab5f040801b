"""Exact integer ray geometry and the coordinate-derivation propagator.

Rays are normalized integer triples: gcd 1, first nonzero coordinate
positive.  Two rays are parallel exactly when their normal forms agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from math import gcd
from typing import Iterable, Optional, Sequence

from .graph import EdgeVarMap, Graph, edge_pair, edge_var
from .sat import ExternalClause, Propagator

Ray = tuple[int, int, int]


class GeometryError(ValueError):
    pass


def normalize(v: Sequence[int]) -> Ray:
    if len(v) != 3:
        raise GeometryError(f"rays are 3-vectors, got {v!r}")
    for x in v:
        if not isinstance(x, int):
            raise GeometryError(f"non-integer coordinate {x!r}")
    x, y, z = v
    g = gcd(gcd(abs(x), abs(y)), abs(z))
    if g == 0:
        raise GeometryError("zero vector")
    x, y, z = x // g, y // g, z // g
    if x < 0 or (x == 0 and (y < 0 or (y == 0 and z < 0))):
        x, y, z = -x, -y, -z
    return (x, y, z)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross_raw(u: Sequence[int], v: Sequence[int]) -> tuple[int, int, int]:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def cross(u: Sequence[int], v: Sequence[int]) -> Ray:
    c = cross_raw(u, v)
    if c == (0, 0, 0):
        raise GeometryError(f"parallel rays {tuple(u)} and {tuple(v)} have no unique orthogonal ray")
    return normalize(c)


def is_parallel(u: Sequence[int], v: Sequence[int]) -> bool:
    return cross_raw(u, v) == (0, 0, 0)


class RaySet:
    """Ordered distinct rays; position ``i`` is vertex ``i + 1``."""

    def __init__(self, rays: Iterable[Sequence[int]]):
        rs = [normalize(tuple(r)) for r in rays]
        if len(set(rs)) != len(rs):
            dup = next(r for r in rs if rs.count(r) > 1)
            raise GeometryError(f"parallel rays in set: {dup}")
        self.rays: list[Ray] = rs

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def __getitem__(self, i):
        return self.rays[i]

    def __eq__(self, other):
        return isinstance(other, RaySet) and self.rays == other.rays

    def __repr__(self):
        return f"RaySet({len(self.rays)} rays)"

    def index(self, r: Sequence[int]) -> int:
        return self.rays.index(normalize(tuple(r)))

    def permuted(self, labeling) -> "RaySet":
        """Move the ray of vertex ``v`` to position ``labeling(v)``."""
        out = [None] * len(self.rays)
        for v, r in enumerate(self.rays, 1):
            out[labeling(v) - 1] = r
        return RaySet(out)

    def to_text(self) -> str:
        return "".join(f"{x} {y} {z}\n" for x, y, z in self.rays)

    def write(self, path, header: str = "") -> None:
        with open(path, "w") as fh:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "RaySet":
        rays = []
        for lineno, line in enumerate(text.splitlines(), 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            if len(parts) != 3:
                raise GeometryError(f"line {lineno}: expected 3 integers, got {s!r}")
            try:
                rays.append(tuple(int(p) for p in parts))
            except ValueError:
                raise GeometryError(f"line {lineno}: non-integer coordinate in {s!r}") from None
        return cls(rays)

    @classmethod
    def read(cls, path) -> "RaySet":
        with open(path) as fh:
            return cls.from_text(fh.read())


BUILTIN_SETS = ("yu-oh-13", "closure-25", "schutte-33", "ck-37")


def builtin(name: str) -> RaySet:
    """One of the ray files shipped with the package."""
    if name not in BUILTIN_SETS:
        raise KeyError(f"unknown ray set {name!r}; known: {', '.join(BUILTIN_SETS)}")
    text = resources.files("ksgen.data").joinpath(f"{name}.rays").read_text()
    return RaySet.from_text(text)


def closure(base: Iterable[Sequence[int]]) -> RaySet:
    """Close a ray set under adding the ray orthogonal to two orthogonal rays.

    For an orthogonal pair the new ray completes an orthonormal basis, so
    the process stays finite.  Closing under *all* non-parallel pairs does
    not terminate: on the Yu-Oh rays one round gives the 25-ray set, which
    coincides with this closure, but a second round already gives 97 rays.
    Output is sorted lexicographically.
    """
    rays = set(RaySet(base).rays)
    frontier = set(rays)
    while frontier:
        new = set()
        for u in frontier:
            for v in rays:
                if u != v and dot(u, v) == 0:
                    w = cross(u, v)
                    if w not in rays:
                        new.add(w)
        rays |= new
        frontier = new
    return RaySet(sorted(rays))


def cross_round(base: Iterable[Sequence[int]]) -> RaySet:
    """One round of adding ``cross(u, v)`` for every non-parallel pair."""
    rays = set(RaySet(base).rays)
    for u, v in combinations(list(rays), 2):
        rays.add(cross(u, v))
    return RaySet(sorted(rays))


def orthogonality_graph(rs: RaySet | Sequence[Sequence[int]]) -> Graph:
    rays = list(rs)
    n = len(rays)
    return Graph(n, [(i + 1, j + 1) for i, j in combinations(range(n), 2)
                     if dot(rays[i], rays[j]) == 0])


def family_37() -> RaySet:
    """(0,0,1), (0,1,±1), (0,1,±2), (1,1,±1), (1,±1,±2) and their permutations."""
    from itertools import permutations, product

    seeds = [(0, 0, 1), (0, 1, 1), (0, 1, 2), (1, 1, 1), (1, 1, 2)]
    out = set()
    for s in seeds:
        for p in permutations(s):
            for signs in product((1, -1), repeat=3):
                out.add(normalize(tuple(a * b for a, b in zip(p, signs))))
    return RaySet(sorted(out))


def schutte_33() -> RaySet:
    drop = {normalize(r) for r in [(0, 1, 2), (0, 1, -2), (0, 2, 1), (0, 2, -1)]}
    return RaySet([r for r in family_37() if r not in drop])


# -- derivation ----------------------------------------------------------------


@dataclass
class Derived:
    ray: Ray
    deps: frozenset  # edge variables
    parents: tuple[int, int]


@dataclass
class Conflict:
    kind: str  # "parallel" | "orthogonality"
    v: int
    w: int
    edges: frozenset  # edge variables whose conjunction is contradictory

    def clause(self) -> list[int]:
        return sorted(-e for e in self.edges)

    def witness(self) -> list[tuple[int, int]]:
        return sorted(edge_pair(e) for e in self.edges)


class Deriver:
    """Forward derivation of coordinates from known rays and true edges.

    Vertices ``1..p`` carry the base rays.  An unknown vertex with two known
    neighbours takes the cross product of its two smallest known neighbours.
    The first contradiction found is reported.
    """

    def __init__(self, base: Sequence[Ray], n: int):
        self.p = len(base)
        self.n = n
        self.base = list(base)
        self.adj: list[set[int]] = [set() for _ in range(n + 1)]
        self.known: dict[int, Derived] = {
            v: Derived(r, frozenset(), (0, 0)) for v, r in enumerate(self.base, 1)}
        self.by_ray: dict[Ray, int] = {r: v for v, r in enumerate(self.base, 1)}

    def add_edge(self, i: int, j: int) -> None:
        self.adj[i].add(j)
        self.adj[j].add(i)

    def _edge_conflict(self, v: int, u: int) -> Optional[Conflict]:
        a, b = self.known[v], self.known[u]
        if dot(a.ray, b.ray) != 0:
            e = edge_var(min(u, v), max(u, v))
            return Conflict("orthogonality", min(u, v), max(u, v), a.deps | b.deps | {e})
        return None

    def check_edges(self) -> Optional[Conflict]:
        for v in sorted(self.known):
            for u in sorted(self.adj[v]):
                if u > v and u in self.known and (v > self.p or u > self.p):
                    c = self._edge_conflict(v, u)
                    if c:
                        return c
        return None

    def derive_all(self, record=None) -> Optional[Conflict]:
        changed = True
        while changed:
            changed = False
            for v in range(self.p + 1, self.n + 1):
                if v in self.known:
                    continue
                kn = sorted(u for u in self.adj[v] if u in self.known)
                if len(kn) < 2:
                    continue
                u1, u2 = kn[0], kn[1]
                d1, d2 = self.known[u1], self.known[u2]
                c = cross_raw(d1.ray, d2.ray)
                if c == (0, 0, 0):
                    # only reachable if two known vertices share a ray
                    return Conflict("parallel", u1, u2, d1.deps | d2.deps)
                ray = normalize(c)
                deps = d1.deps | d2.deps | {edge_var(min(v, u1), max(v, u1)),
                                            edge_var(min(v, u2), max(v, u2))}
                self.known[v] = Derived(ray, frozenset(deps), (u1, u2))
                if record is not None:
                    record.append(v)
                changed = True
                w = self.by_ray.get(ray)
                if w is not None:
                    return Conflict("parallel", min(v, w), max(v, w),
                                    self.known[v].deps | self.known[w].deps)
                self.by_ray[ray] = v
                for u in kn[2:]:
                    cf = self._edge_conflict(v, u)
                    if cf:
                        return cf
                for u in self.adj[v]:
                    if u in self.known and u not in kn:
                        cf = self._edge_conflict(v, u)
                        if cf:
                            return cf
        return None


@dataclass
class Realizability:
    status: str  # "realized" | "contradictory" | "undetermined"
    rays: Optional[RaySet] = None
    conflict: Optional[Conflict] = None
    undetermined: list[int] = field(default_factory=list)
    faithful: Optional[bool] = None  # realized and no extra orthogonalities


def realizability_status(g: Graph, base: RaySet) -> Realizability:
    p = len(base)
    if p > g.n or g.prefix(p) != orthogonality_graph(base):
        raise GeometryError("graph prefix does not match the base orthogonality graph")
    d = Deriver(list(base), g.n)
    for i, j in g.edges():
        if j > p:
            d.add_edge(i, j)
    cf = d.derive_all() or d.check_edges()
    if cf:
        return Realizability("contradictory", conflict=cf)
    missing = [v for v in range(p + 1, g.n + 1) if v not in d.known]
    if missing:
        return Realizability("undetermined", undetermined=missing)
    rays = RaySet([d.known[v].ray for v in range(1, g.n + 1)])
    return Realizability("realized", rays=rays, faithful=orthogonality_graph(rays) == g)


class GeometryHook(Propagator):
    """Derives ray coordinates during search and blocks contradictions.

    Edge assignments and derivations are logged with the decision level at
    which they happened and rolled back on backtrack.  Derivation runs at
    poll time, after each propagation fixpoint.
    """

    def __init__(self, n: int, base: RaySet):
        self.n = n
        self.p = len(base)
        self.base = list(base)
        ev = EdgeVarMap(n)
        self.observed = [v for v in range(ev.prefix_size(self.p) + 1, ev.num_vars + 1)]
        self._pair = {v: ev.pair(v) for v in self.observed}
        self.level = 0
        self.edges: list[tuple[int, int, int]] = []  # (level, i, j)
        self.dirty = False
        self.conflicts = 0
        self.derivations = 0
        self.state = self._fresh()

    def _fresh(self) -> Deriver:
        return Deriver(self.base, self.n)

    def on_assign(self, lit):
        if lit > 0:
            i, j = self._pair[lit]
            self.edges.append((self.level, i, j))
            self.state.add_edge(i, j)
            self.dirty = True

    def on_new_level(self):
        self.level += 1

    def on_backtrack(self, level):
        self.level = level
        k = len(self.edges)
        while k and self.edges[k - 1][0] > level:
            k -= 1
        if k < len(self.edges):
            del self.edges[k:]
            # rebuilding is cheap for the handful of free vertices involved
            self.state = self._fresh()
            for _, i, j in self.edges:
                self.state.add_edge(i, j)
            self.dirty = True

    def poll(self):
        if not self.dirty:
            return []
        self.dirty = False
        rec = []
        cf = self.state.derive_all(rec) or self.state.check_edges()
        self.derivations += len(rec)
        if cf is None:
            return []
        self.conflicts += 1
        # keep the state consistent: the solver will backtrack past this point
        self.dirty = True
        return [ExternalClause(cf.clause(), "o", cf.witness())]
