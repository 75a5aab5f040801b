"""Isomorph-free generation: the SAT solver plus canonicity, geometry and 010 hooks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

from .canon import is_rcl_canonical, rcl_canon
from .encode import BaseFixing, EncodeOptions, Lazy010Hook, encode, graph_from_model
from .geom import GeometryHook, RaySet, Realizability, orthogonality_graph, realizability_status
from .graph import EdgeVarMap, Graph
from .sat import Cnf, ExternalClause, Propagator, Solver


def get_complete_prefix(assigned: Sequence[int] | set, n: Optional[int] = None) -> int:
    """Largest ``k`` whose ``C(k, 2)`` edge variables are all assigned."""
    s = set(abs(x) for x in assigned)
    k = 1
    while (n is None or k < n) and all(v in s for v in range(comb(k, 2) + 1, comb(k + 1, 2) + 1)):
        k += 1
    return k


class PrefixTracker:
    """Incremental ``get_complete_prefix`` with level-based undo."""

    def __init__(self, n: int):
        self.n = n
        self.m = comb(n, 2)
        self.assigned = [False] * (self.m + 2)
        self.assigned[self.m + 1] = False
        self.first_free = 1
        self.log: list[tuple[int, int]] = []  # (level, var)

    def assign(self, var: int, level: int) -> None:
        self.assigned[var] = True
        self.log.append((level, var))
        while self.first_free <= self.m and self.assigned[self.first_free]:
            self.first_free += 1

    def backtrack(self, level: int) -> None:
        log = self.log
        while log and log[-1][0] > level:
            _, v = log.pop()
            self.assigned[v] = False
            if v < self.first_free:
                self.first_free = v

    def k(self) -> int:
        # all variables below first_free are assigned
        done = self.first_free - 1
        k = 1
        while k < self.n and comb(k + 1, 2) <= done:
            k += 1
        return k


class RclHook(Propagator):
    """Blocks partial graphs whose complete prefix is not RCL-canonical."""

    def __init__(self, n: int, cache_limit: int = 200_000):
        self.n = n
        ev = EdgeVarMap(n)
        self.observed = range(1, ev.num_vars + 1)
        self.tracker = PrefixTracker(n)
        self.value = [0] * (ev.num_vars + 1)
        self.pairs = [None] + list(ev.pairs())
        self.level = 0
        self.checked: list[tuple[int, int]] = [(1, 0)]  # (k, level of the check)
        self.cache: dict = {}
        self.verdicts: dict = {}
        self.cache_limit = cache_limit
        self.checks = 0
        self.blocks = 0

    def on_assign(self, lit):
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.tracker.assign(v, self.level)

    def on_new_level(self):
        self.level += 1

    def on_backtrack(self, level):
        self.level = level
        self.tracker.backtrack(level)
        while self.checked[-1][1] > level:
            self.checked.pop()

    def prefix_graph(self, k: int) -> Graph:
        val = self.value
        return Graph(k, [self.pairs[v] for v in range(1, comb(k, 2) + 1) if val[v] > 0])

    def _check(self, g: Graph):
        hit = self.verdicts.get(g)
        if hit is None:
            hit = self.verdicts[g] = is_rcl_canonical(g, self.cache)
        return hit

    def poll(self):
        k = self.tracker.k()
        last = self.checked[-1][0]
        if k <= last or k < 2:
            return []
        if len(self.cache) > self.cache_limit:
            self.cache.clear()
            self.verdicts.clear()
        self.checks += 1
        ok, _ = self._check(self.prefix_graph(k))
        if ok:
            self.checked.append((k, self.level))
            return []
        # find the shortest non-canonical prefix; all before ``last`` passed already
        for j in range(last + 1, k + 1):
            g = self.prefix_graph(j)
            ok, lab = self._check(g)
            if not ok:
                break
            self.checked.append((j, self.level))
        self.blocks += 1
        val = self.value
        lits = [-v if val[v] > 0 else v for v in range(1, comb(j, 2) + 1)]
        return [ExternalClause(lits, "t", lab)]


@dataclass
class SearchConfig:
    n: int
    base_graph: Optional[Graph] = None
    base_rays: Optional[RaySet] = None
    rcl: bool = True
    geometry: bool = True
    lazy010: bool = True
    options: EncodeOptions = field(default_factory=EncodeOptions)
    decision: str = "static-prefix"
    proof: object = None  # a sink with emit(kind, lits, witness)
    cube: Sequence[int] = ()
    max_conflicts: Optional[int] = None
    max_seconds: Optional[float] = None


@dataclass
class SearchResult:
    graphs: list[Graph]
    realizability: list[Optional[Realizability]]
    exhaustive: bool
    stats: dict
    cnf: Cnf
    base_rays: Optional[RaySet]
    reason: str = ""

    @property
    def status(self) -> str:
        return "exhaustive" if self.exhaustive else "indeterminate"


def prepare_base(graph: Optional[Graph], rays: Optional[RaySet]) -> tuple[Optional[Graph], Optional[RaySet]]:
    """Relabel a base (graph and rays together) into its RCL-canonical form."""
    if rays is not None:
        g = orthogonality_graph(rays)
        if graph is not None and graph != g:
            raise ValueError("base graph does not match the base rays")
        graph = g
    if graph is None:
        return None, None
    r = rcl_canon(graph)
    if rays is not None:
        rays = rays.permuted(r.labeling)
    return r.canonical_graph, rays


def build_cnf(cfg: SearchConfig, base_graph: Optional[Graph]) -> Cnf:
    base = BaseFixing(base_graph) if base_graph is not None else None
    enc = encode(cfg.n, base, cfg.options)
    cnf = enc.cnf
    cnf.comments.append(f"hooks rcl={int(cfg.rcl)} geometry={int(cfg.geometry)} lazy010={int(cfg.lazy010)}")
    if cfg.cube:
        cnf.comments.append("cube " + " ".join(map(str, cfg.cube)))
        for lit in cfg.cube:
            cnf.add([lit])
    return cnf


def run_search(cfg: SearchConfig) -> SearchResult:
    base_graph, base_rays = prepare_base(cfg.base_graph, cfg.base_rays)
    if cfg.geometry and base_rays is None:
        raise ValueError("geometry propagation needs base rays")
    cnf = build_cnf(cfg, base_graph)
    hooks: list[Propagator] = []
    rcl_hook = geo_hook = lazy_hook = None
    if cfg.rcl:
        rcl_hook = RclHook(cfg.n)
        hooks.append(rcl_hook)
    if cfg.geometry:
        geo_hook = GeometryHook(cfg.n, base_rays)
        hooks.append(geo_hook)
    if cfg.lazy010:
        lazy_hook = Lazy010Hook(cfg.n)
        hooks.append(lazy_hook)
    m = comb(cfg.n, 2)
    solver = Solver(cnf, hooks, proof=cfg.proof, decision=cfg.decision,
                    priority=range(1, m + 1), max_conflicts=cfg.max_conflicts,
                    max_seconds=cfg.max_seconds)
    graphs = []
    for model in solver.enumerate(project=range(1, m + 1)):
        graphs.append(graph_from_model(cfg.n, model))
    final = solver.final
    stats = dict(final.stats)
    if rcl_hook:
        stats["rcl_checks"] = rcl_hook.checks
        stats["rcl_blocks"] = rcl_hook.blocks
    if geo_hook:
        stats["geom_derivations"] = geo_hook.derivations
        stats["geom_conflicts"] = geo_hook.conflicts
    if lazy_hook:
        stats["lazy010_blocks"] = lazy_hook.blocked
    real = [realizability_status(g, base_rays) if base_rays is not None else None for g in graphs]
    return SearchResult(graphs, real, final.status == "UNSAT", stats, cnf, base_rays, final.reason)


def make_cubes(n: int, depth: int, base_order: int = 0) -> list[list[int]]:
    """``2**depth`` cubes over the first ``depth`` edge variables past the base."""
    first = comb(base_order, 2) + 1
    free = comb(n, 2) - first + 1
    if depth > free:
        raise ValueError(f"depth {depth} exceeds the {free} free edge variables")
    vars_ = list(range(first, first + depth))
    return [[v if bit else -v for v, bit in zip(vars_, bits)]
            for bits in itertools.product((0, 1), repeat=depth)]


def read_cubes(path) -> list[list[int]]:
    cubes = []
    with open(path) as fh:
        for line in fh:
            toks = [int(t) for t in line.split()]
            if not toks:
                continue
            if toks[-1] != 0:
                raise ValueError(f"cube line not terminated by 0: {line.strip()!r}")
            cubes.append(toks[:-1])
    return cubes


def write_cubes(path, cubes) -> None:
    with open(path, "w") as fh:
        for c in cubes:
            fh.write(" ".join(map(str, c + [0])) + "\n")
