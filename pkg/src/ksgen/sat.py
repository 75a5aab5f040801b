"""A compact CDCL SAT solver with an external-propagator interface.

Two watched literals, first-UIP learning, phase saving, Luby restarts and
LBD-based learned clause deletion.  Propagators observe assignments, level
changes and backtracks, and may inject clauses that are falsified or unit
under the current assignment (or simply valid).  Every learned, injected and
deleted clause is reported to an optional proof sink.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Optional, Sequence


class Cnf:
    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = (),
                 comments: Iterable[str] = ()):
        self.num_vars = num_vars
        self.clauses: list[list[int]] = []
        self.comments = list(comments)
        for c in clauses:
            self.add(c)

    def add(self, clause: Sequence[int]) -> None:
        c = [int(x) for x in clause]
        if not c:
            raise ValueError("empty clause in CNF")
        for lit in c:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} outside 1..{self.num_vars}")
        self.clauses.append(c)

    def copy(self) -> "Cnf":
        return Cnf(self.num_vars, [list(c) for c in self.clauses], self.comments)

    def to_dimacs(self) -> str:
        lines = [f"c {c}" for c in self.comments]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_dimacs())

    @classmethod
    def from_dimacs(cls, text: str) -> "Cnf":
        comments, clauses, cur = [], [], []
        nv = None
        for lineno, line in enumerate(text.splitlines(), 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("c"):
                comments.append(s[1:].strip())
                continue
            if s.startswith("p"):
                parts = s.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ValueError(f"line {lineno}: bad problem line")
                nv = int(parts[2])
                continue
            for tok in s.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(lit)
        if nv is None:
            raise ValueError("missing 'p cnf' line")
        if cur:
            clauses.append(cur)
        return cls(nv, clauses, comments)

    @classmethod
    def read(cls, path) -> "Cnf":
        with open(path) as fh:
            return cls.from_dimacs(fh.read())


@dataclass
class ExternalClause:
    """A clause offered by a propagator; ``kind`` selects the proof line type."""

    lits: list[int]
    kind: str = "add"  # "add" | "t" | "o"
    witness: Any = None


class Propagator:
    """Base class for solver hooks; every callback is optional."""

    #: variables whose assignments are reported through ``on_assign``
    observed: Optional[Iterable[int]] = None

    def on_assign(self, lit: int) -> None:
        pass

    def on_new_level(self) -> None:
        pass

    def on_backtrack(self, level: int) -> None:
        pass

    def poll(self) -> list[ExternalClause]:
        return []

    def on_final_model(self, model: list[int]) -> Optional[ExternalClause]:
        return None


@dataclass
class SolveResult:
    status: str  # "SAT" | "UNSAT" | "INDETERMINATE"
    model: Optional[list[int]] = None
    stats: dict = field(default_factory=dict)
    reason: str = ""


class _Clause(list):
    __slots__ = ("learnt", "lbd", "deleted")


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    RESTART_BASE = 64

    def __init__(self, cnf: Cnf, hooks: Sequence[Propagator] = (), proof=None,
                 decision: str = "activity", priority: Optional[Sequence[int]] = None,
                 max_conflicts: Optional[int] = None, max_seconds: Optional[float] = None):
        if decision not in ("activity", "static-prefix"):
            raise ValueError(f"unknown decision policy {decision!r}")
        nv = cnf.num_vars
        self.nv = nv
        self.hooks = list(hooks)
        self.proof = proof
        self.decision = decision
        self.max_conflicts = max_conflicts
        self.max_seconds = max_seconds

        size = 2 * nv + 1
        self.val = [0] * size  # indexed by literal; negative literals wrap around
        self.watches: list[list[_Clause]] = [[] for _ in range(size)]
        self.level = [0] * (nv + 1)
        self.reason: list[Optional[_Clause]] = [None] * (nv + 1)
        self.phase = [False] * (nv + 1)
        self.activity = [0.0] * (nv + 1)
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.seen = [False] * (nv + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[_Clause] = []
        self.learnts: list[_Clause] = []
        self.max_learnts = max(2000, len(cnf.clauses) // 3)
        self.unsat = False
        self._unsat_logged = False

        prio = sorted(set(priority)) if priority is not None else list(range(1, nv + 1))
        in_prio = [False] * (nv + 1)
        for v in prio:
            in_prio[v] = True
        self.prio_vars = prio
        self.rest_vars = [v for v in range(1, nv + 1) if not in_prio[v]]
        self.in_prio = in_prio
        self.heaps = ([(0.0, v) for v in self.prio_vars], [(0.0, v) for v in self.rest_vars])

        watchers: list = [()] * (nv + 1)
        for h in self.hooks:
            vs = range(1, nv + 1) if h.observed is None else h.observed
            for v in vs:
                watchers[v] = watchers[v] + (h,)
        self.watchers = watchers

        self.stats = dict(decisions=0, conflicts=0, propagations=0, learned=0,
                          deleted=0, restarts=0, external=0, models=0)
        self._t0 = None
        self._restart_count = 0
        self._conflicts_since_restart = 0

        for c in cnf.clauses:
            self._add_input_clause(c)
            if self.unsat:
                break

    # -- proof ---------------------------------------------------------------

    def _emit(self, kind, lits, witness=None):
        if self.proof is not None:
            self.proof.emit(kind, lits, witness)

    def _conclude_unsat(self):
        self.unsat = True
        if not self._unsat_logged:
            self._unsat_logged = True
            self._emit("add", [])

    # -- assignment ------------------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def value(self, lit: int) -> int:
        return self.val[lit]

    def _assign(self, lit: int, reason: Optional[_Clause]) -> None:
        v = lit if lit > 0 else -lit
        self.val[lit] = 1
        self.val[-lit] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        for h in self.watchers[v]:
            h.on_assign(lit)

    def _add_input_clause(self, lits) -> None:
        c = list(dict.fromkeys(lits))
        if any(-x in c for x in c):
            return
        if len(c) == 1:
            lit = c[0]
            if self.val[lit] == -1:
                self._conclude_unsat()
            elif self.val[lit] == 0:
                self._assign(lit, None)
            return
        cl = _Clause(c)
        cl.learnt = False
        cl.lbd = 0
        cl.deleted = False
        self.watches[cl[0]].append(cl)
        self.watches[cl[1]].append(cl)
        self.clauses.append(cl)

    def _propagate(self) -> Optional[_Clause]:
        val = self.val
        watches = self.watches
        trail = self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            fl = -p
            ws = watches[fl]
            keep = []
            i = 0
            nws = len(ws)
            while i < nws:
                c = ws[i]
                i += 1
                if c.deleted:
                    continue
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if val[first] == 1:
                    keep.append(c)
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        found = True
                        break
                if found:
                    continue
                keep.append(c)
                if val[first] == -1:
                    keep.extend(ws[i:])
                    watches[fl] = keep
                    self.qhead = len(trail)
                    self.stats["propagations"] += props
                    return c
                self._assign(first, c)
            watches[fl] = keep
        self.stats["propagations"] += props
        return None

    # -- conflict analysis ---------------------------------------------------------

    def _bump_var(self, v: int) -> None:
        a = self.activity[v] + self.var_inc
        self.activity[v] = a
        if a > 1e100:
            for u in range(1, self.nv + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heaps = ([(-self.activity[u], u) for u in self.prio_vars],
                          [(-self.activity[u], u) for u in self.rest_vars])
            for h in self.heaps:
                heapq.heapify(h)
        elif self.val[v] == 0:
            heapq.heappush(self.heaps[0 if self.in_prio[v] else 1], (-a, v))

    def _analyze(self, confl: _Clause) -> tuple[list[int], int]:
        seen = self.seen
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        marked = []
        counter = 0
        p = None
        idx = len(trail) - 1
        c = confl
        while True:
            if c.learnt:
                c.lbd = min(c.lbd, len({level[abs(x)] for x in c}))
            for q in (c if p is None else c[1:]):
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    marked.append(v)
                    self._bump_var(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            pv = abs(p)
            c = self.reason[pv]
            seen[pv] = False
            counter -= 1
            if counter <= 0:
                break
        learnt[0] = -p
        for v in marked:
            seen[v] = False
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[abs(learnt[k])] > level[abs(learnt[best])]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _handle_conflict(self, confl: _Clause) -> None:
        self.stats["conflicts"] += 1
        self._conflicts_since_restart += 1
        if not self.trail_lim:
            self._conclude_unsat()
            return
        learnt, bt = self._analyze(confl)
        self._backtrack(bt)
        self._emit("add", learnt)
        self.stats["learned"] += 1
        if len(learnt) == 1:
            self._assign(learnt[0], None)
        else:
            cl = _Clause(learnt)
            cl.learnt = True
            cl.deleted = False
            cl.lbd = len({self.level[abs(x)] for x in learnt[1:]}) + 1
            self.watches[cl[0]].append(cl)
            self.watches[cl[1]].append(cl)
            self.learnts.append(cl)
            self._assign(learnt[0], cl)
        self.var_inc /= 0.95

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val = self.val
        for i in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[i]
            v = lit if lit > 0 else -lit
            self.phase[v] = lit > 0
            val[lit] = 0
            val[-lit] = 0
            self.reason[v] = None
            heapq.heappush(self.heaps[0 if self.in_prio[v] else 1], (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        for h in self.hooks:
            h.on_backtrack(lvl)

    # -- external clauses ---------------------------------------------------------

    def add_external(self, ext: ExternalClause) -> None:
        """Add a propagator clause; handles the conflicting and unit cases."""
        self.stats["external"] += 1
        lits = list(dict.fromkeys(ext.lits))
        self._emit(ext.kind, list(ext.lits), ext.witness)
        if any(-x in lits for x in lits):
            return
        if not lits:
            self._conclude_unsat()
            return
        val = self.val
        level = self.level
        lits.sort(key=lambda x: (val[x] == -1, -level[abs(x)] if val[x] == -1 else -val[x]))
        if len(lits) == 1:
            lit = lits[0]
            self._backtrack(0)
            if val[lit] == -1:
                self._conclude_unsat()
            elif val[lit] == 0:
                self._assign(lit, None)
            return
        cl = _Clause(lits)
        cl.learnt = False
        cl.lbd = 0
        cl.deleted = False
        self.watches[cl[0]].append(cl)
        self.watches[cl[1]].append(cl)
        self.clauses.append(cl)
        v0, v1 = val[cl[0]], val[cl[1]]
        if v0 == 1 or (v0 == 0 and v1 == 0):
            return
        if v0 == 0:
            self._assign(cl[0], cl)
            return
        top = level[abs(cl[0])]
        second = level[abs(cl[1])]
        if top == 0:
            self._conclude_unsat()
            return
        if second < top:
            self._backtrack(second)
            self._assign(cl[0], cl)
            return
        self._backtrack(top)
        self._handle_conflict(cl)

    # -- decisions ------------------------------------------------------------------

    def _pick(self) -> Optional[int]:
        val = self.val
        if self.decision == "static-prefix":
            for group in (self.prio_vars, self.rest_vars):
                for v in group:
                    if val[v] == 0:
                        return v
            return None
        act = self.activity
        for heap in self.heaps:
            while heap:
                a, v = heap[0]
                if val[v] != 0 or -a != act[v]:
                    heapq.heappop(heap)
                    continue
                return v
        return None

    def _reduce_db(self) -> None:
        val = self.val
        reason = self.reason

        def locked(c):
            return val[c[0]] == 1 and reason[abs(c[0])] is c

        self.learnts.sort(key=lambda c: (c.lbd, len(c)))
        keep_n = len(self.learnts) // 2
        kept = []
        for i, c in enumerate(self.learnts):
            if i < keep_n or c.lbd <= 2 or locked(c):
                kept.append(c)
            else:
                c.deleted = True
                self._emit("delete", list(c))
                self.stats["deleted"] += 1
        self.learnts = kept
        self.max_learnts = int(self.max_learnts * 1.1)

    def _budget_exceeded(self) -> Optional[str]:
        if self.max_conflicts is not None and self.stats["conflicts"] >= self.max_conflicts:
            return f"conflict budget {self.max_conflicts} exhausted"
        if self.max_seconds is not None and time.perf_counter() - self._t0 > self.max_seconds:
            return f"time budget {self.max_seconds}s exhausted"
        return None

    # -- main loop ------------------------------------------------------------------

    def _search(self) -> SolveResult:
        """Run until a model passes every hook, UNSAT, or the budget runs out."""
        restart_limit = luby(self._restart_count + 1) * self.RESTART_BASE
        while True:
            if self.unsat:
                return self._result("UNSAT")
            confl = self._propagate()
            if confl is not None:
                self._handle_conflict(confl)
                if self.stats["conflicts"] & 255 == 0:
                    why = self._budget_exceeded()
                    if why:
                        return self._result("INDETERMINATE", reason=why)
                continue
            injected = False
            for h in self.hooks:
                for ext in h.poll():
                    injected = True
                    self.add_external(ext)
                    if self.unsat:
                        return self._result("UNSAT")
            if injected:
                continue
            why = self._budget_exceeded()
            if why:
                return self._result("INDETERMINATE", reason=why)
            if self._conflicts_since_restart >= restart_limit:
                self._conflicts_since_restart = 0
                self._restart_count += 1
                self.stats["restarts"] += 1
                restart_limit = luby(self._restart_count + 1) * self.RESTART_BASE
                self._backtrack(0)
                continue
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
            v = self._pick()
            if v is None:
                model = [u if self.val[u] == 1 else -u for u in range(1, self.nv + 1)]
                rejected = False
                for h in self.hooks:
                    ext = h.on_final_model(model)
                    if ext is not None:
                        rejected = True
                        self.add_external(ext)
                        break
                if rejected:
                    continue
                return self._result("SAT", model=model)
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            for h in self.hooks:
                h.on_new_level()
            self._assign(v if self.phase[v] else -v, None)

    def _result(self, status, model=None, reason="") -> SolveResult:
        st = dict(self.stats)
        st["seconds"] = round(time.perf_counter() - self._t0, 6)
        return SolveResult(status, model, st, reason)

    def solve(self) -> SolveResult:
        self._t0 = time.perf_counter()
        return self._search()

    def enumerate(self, project: Optional[Sequence[int]] = None) -> Iterator[list[int]]:
        """Yield every model once (distinct on ``project``), then finish UNSAT.

        After exhaustion ``self.final`` holds the closing result; an
        ``INDETERMINATE`` status there means the enumeration is incomplete.
        """
        self._t0 = time.perf_counter()
        proj = list(range(1, self.nv + 1)) if project is None else list(project)
        while True:
            res = self._search()
            if res.status != "SAT":
                self.final = res
                return
            self.stats["models"] += 1
            yield res.model
            block = [-v if res.model[v - 1] > 0 else v for v in proj]
            self.add_external(ExternalClause(block, "add"))


def solve(cnf: Cnf, hooks: Sequence[Propagator] = (), **opts) -> SolveResult:
    return Solver(cnf, hooks, **opts).solve()


def enumerate_models(cnf: Cnf, hooks: Sequence[Propagator] = (),
                     project: Optional[Sequence[int]] = None, **opts) -> list[list[int]]:
    s = Solver(cnf, hooks, **opts)
    return list(s.enumerate(project))


def stats_text(stats: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in stats.items())


def pigeonhole(pigeons: int, holes: int) -> Cnf:
    """PHP(p, h): variable ``(i-1)*h + j`` puts pigeon i in hole j."""
    def var(i, j):
        return (i - 1) * holes + j
    cnf = Cnf(pigeons * holes)
    for i in range(1, pigeons + 1):
        cnf.add([var(i, j) for j in range(1, holes + 1)])
    for j in range(1, holes + 1):
        for i in range(1, pigeons + 1):
            for k in range(i + 1, pigeons + 1):
                cnf.add([-var(i, j), -var(k, j)])
    return cnf
