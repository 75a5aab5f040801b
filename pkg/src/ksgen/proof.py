"""Extended DRAT proofs: writing and independent checking.

Line grammar (one event per line, space separated)::

    <lits> 0                       clause addition (checked by RUP)
    d <lits> 0                     deletion
    t <lits> 0 <pi(1) .. pi(k)> 0  canonicity clause with permutation witness
    o <lits> 0 <v1 u1 v2 u2 ..> 0  geometry clause with witness edges

The checker only imports graph and ray primitives; it has its own unit
propagation, its own 010-coloring test and its own coordinate re-derivation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Optional, Sequence

from .geom import RaySet, cross_raw, dot, normalize
from .graph import Graph, apply_perm, edge_pair, edge_var, encode_graph6, Permutation
from .sat import Cnf


class ProofWriter:
    """Proof sink; whole lines only, so a crash leaves a valid prefix."""

    def __init__(self, path, flush_every: int = 1000):
        self.path = os.fspath(path)
        self.fh = open(self.path, "w")
        self.flush_every = flush_every
        self.lines = 0

    def emit(self, kind: str, lits: Sequence[int], witness=None) -> None:
        self.fh.write(format_event(kind, lits, witness))
        self.lines += 1
        if self.lines % self.flush_every == 0:
            self.fh.flush()

    def close(self) -> None:
        self.fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ProofRecorder:
    """In-memory sink, handy for tests."""

    def __init__(self):
        self.lines: list[str] = []

    def emit(self, kind, lits, witness=None):
        self.lines.append(format_event(kind, lits, witness))

    def text(self) -> str:
        return "".join(self.lines)


def format_event(kind: str, lits: Sequence[int], witness=None) -> str:
    body = " ".join(str(x) for x in lits)
    body = f"{body} 0" if body else "0"
    if kind == "add":
        return body + "\n"
    if kind == "delete":
        return f"d {body}\n"
    if kind == "t":
        image = witness.image if isinstance(witness, Permutation) else tuple(witness)
        return f"t {body} {' '.join(map(str, image))} 0\n"
    if kind == "o":
        pairs = " ".join(f"{max(a, b)} {min(a, b)}" for a, b in witness)
        return f"o {body} {pairs} 0\n" if pairs else f"o {body} 0\n"
    raise ValueError(f"unknown proof event kind {kind!r}")


@dataclass
class ProofEvent:
    kind: str  # add | delete | t | o
    lits: list[int]
    witness: Optional[list] = None
    line: int = 0


class ProofParseError(ValueError):
    pass


def parse_line(text: str, lineno: int = 0) -> ProofEvent:
    toks = text.split()
    if not toks:
        raise ProofParseError("empty line")
    kind = "add"
    if toks[0] in ("d", "t", "o"):
        kind = {"d": "delete", "t": "t", "o": "o"}[toks[0]]
        toks = toks[1:]
    try:
        nums = [int(t) for t in toks]
    except ValueError:
        raise ProofParseError(f"non-integer token in {text.strip()!r}") from None
    if 0 not in nums:
        raise ProofParseError("clause not terminated by 0")
    z = nums.index(0)
    lits, rest = nums[:z], nums[z + 1:]
    if kind in ("add", "delete"):
        if rest:
            raise ProofParseError("trailing tokens after clause")
        return ProofEvent(kind, lits, None, lineno)
    if not rest or rest[-1] != 0 or 0 in rest[:-1]:
        raise ProofParseError("witness must be a single 0-terminated list")
    wit = rest[:-1]
    if kind == "o":
        if len(wit) % 2:
            raise ProofParseError("odd number of witness vertices")
        wit = [(wit[i], wit[i + 1]) for i in range(0, len(wit), 2)]
    return ProofEvent(kind, lits, wit, lineno)


def iter_events(lines: Iterable[str]):
    for lineno, line in enumerate(lines, 1):
        if not line.endswith("\n"):
            raise ProofParseError(f"line {lineno}: truncated (no newline)")
        if not line.strip():
            continue
        try:
            yield parse_line(line, lineno)
        except ProofParseError as e:
            raise ProofParseError(f"line {lineno}: {e}") from None


# -- clause database with unit propagation --------------------------------------


class _ClauseDB:
    def __init__(self, nv: int):
        self.nv = nv
        self.val = [0] * (2 * nv + 1)
        self.watch: list[list[list]] = [[] for _ in range(2 * nv + 1)]
        self.trail: list[int] = []
        self.head = 0
        self.inconsistent = False
        self.index: dict[tuple, list[list]] = {}

    def _set(self, lit):
        self.val[lit] = 1
        self.val[-lit] = -1
        self.trail.append(lit)

    def _propagate(self) -> bool:
        """Unit propagation; False on conflict."""
        val, watch, trail = self.val, self.watch, self.trail
        while self.head < len(trail):
            false_lit = -trail[self.head]
            self.head += 1
            ws = watch[false_lit]
            i = 0
            while i < len(ws):
                c = ws[i]
                if c[0] is None:  # deleted
                    ws[i] = ws[-1]
                    ws.pop()
                    continue
                lits = c[1]
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                if val[lits[0]] == 1:
                    i += 1
                    continue
                for k in range(2, len(lits)):
                    if val[lits[k]] != -1:
                        lits[1], lits[k] = lits[k], lits[1]
                        watch[lits[1]].append(c)
                        ws[i] = ws[-1]
                        ws.pop()
                        break
                else:
                    if val[lits[0]] == -1:
                        self.head = len(trail)
                        return False
                    self._set(lits[0])
                    i += 1
        return True

    def _undo(self, mark: int) -> None:
        for lit in self.trail[mark:]:
            self.val[lit] = 0
            self.val[-lit] = 0
        del self.trail[mark:]
        self.head = mark

    def add(self, lits: Sequence[int]) -> None:
        if self.inconsistent:
            return
        lits = list(dict.fromkeys(lits))
        if any(-x in lits for x in lits):
            return
        key = tuple(sorted(lits))
        val = self.val
        lits.sort(key=lambda x: val[x] == -1)
        c = [True, lits]
        self.index.setdefault(key, []).append(c)
        if not lits or val[lits[0]] == -1:
            self.inconsistent = True
            return
        if len(lits) == 1 or val[lits[1]] == -1:
            if val[lits[0]] == 0:
                self._set(lits[0])
                if not self._propagate():
                    self.inconsistent = True
            if len(lits) == 1:
                return
        self.watch[lits[0]].append(c)
        self.watch[lits[1]].append(c)

    def delete(self, lits: Sequence[int]) -> bool:
        key = tuple(sorted(set(lits)))
        bucket = self.index.get(key)
        if not bucket:
            return False
        c = bucket.pop()
        if len(key) > 1:
            c[0] = None
        return True

    def rup(self, lits: Sequence[int]) -> bool:
        if self.inconsistent:
            return True
        mark = len(self.trail)
        ok = False
        for l in lits:
            v = self.val[l]
            if v == 1:
                ok = True
                break
            if v == 0:
                self._set(-l)
        if not ok:
            ok = not self._propagate()
        self._undo(mark)
        return ok

    def unit_refutes(self, assumption: Sequence[int]) -> bool:
        return self.rup([-l for l in assumption])


# -- local checks -------------------------------------------------------------------


def _colorable_010(g: Graph) -> bool:
    """Independent 010 test: vertex-by-vertex search over the one-set."""
    n = g.n
    rows = g.rows
    tris = []
    for a in range(n):
        for b in range(a + 1, n):
            if rows[a] >> b & 1:
                common = rows[a] & rows[b] & ~((2 << b) - 1)
                while common:
                    c = (common & -common).bit_length() - 1
                    common &= common - 1
                    tris.append((1 << a) | (1 << b) | (1 << c))
    if not tris:
        return True
    members = [[t for t in tris if t >> v & 1] for v in range(n)]

    def rec(v, ones, zeros):
        if v == n:
            return True
        bit = 1 << v
        if not rows[v] & ones:
            if rec_next(v, ones | bit, zeros):
                return True
        return rec_next(v, ones, zeros | bit)

    def rec_next(v, ones, zeros):
        for t in members[v]:
            if not t & ones and (t & zeros) == t:
                return False
        return rec(v + 1, ones, zeros)

    return rec(0, 0, 0)


def _rederive(base: Sequence[tuple], edges: Sequence[tuple[int, int]]) -> tuple[dict, Optional[str]]:
    """Coordinates forced by ``edges`` from the base rays, plus any contradiction."""
    p = len(base)
    known = {v: r for v, r in enumerate(base, 1)}
    nbr: dict[int, set] = {}
    for a, b in edges:
        nbr.setdefault(a, set()).add(b)
        nbr.setdefault(b, set()).add(a)
    progress = True
    while progress:
        progress = False
        for v in sorted(nbr):
            if v in known:
                continue
            kn = sorted(u for u in nbr[v] if u in known)
            if len(kn) >= 2:
                c = cross_raw(known[kn[0]], known[kn[1]])
                if c == (0, 0, 0):
                    return known, f"vertices {kn[0]} and {kn[1]} are parallel"
                known[v] = normalize(c)
                progress = True
    seen = {}
    for v, r in known.items():
        if r in seen:
            return known, f"vertices {seen[r]} and {v} are parallel"
        seen[r] = v
    for a, b in edges:
        if a in known and b in known and dot(known[a], known[b]) != 0:
            return known, f"edge {a}-{b} joins non-orthogonal rays"
    return known, None


# -- verifier -------------------------------------------------------------------------


@dataclass
class VerifyResult:
    ok: bool
    reason: str = ""
    line: int = 0
    detail: str = ""
    counts: dict = field(default_factory=dict)
    max_prefix_lookups: int = 0

    def __str__(self):
        if self.ok:
            return "accept"
        return f"reject: {self.reason} at line {self.line}" + (f" ({self.detail})" if self.detail else "")


def _header_info(cnf: Cnf) -> dict:
    info = {"order": None, "base": 0, "lazy010": False}
    for c in cnf.comments:
        parts = c.split()
        if parts[:1] == ["order"] and len(parts) == 2:
            info["order"] = int(parts[1])
        elif parts[:2] == ["base", "order"]:
            info["base"] = int(parts[2])
        elif parts[:1] == ["hooks"]:
            info["lazy010"] = "lazy010=1" in parts
    return info


def _graph_from_prefix_clause(lits: Sequence[int]) -> Optional[Graph]:
    """Graph blocked by a clause over exactly the variables 1..C(k,2)."""
    m = len(lits)
    k = 2
    while comb(k, 2) < m:
        k += 1
    if comb(k, 2) != m or sorted(abs(l) for l in lits) != list(range(1, m + 1)):
        return None
    return Graph(k, [edge_pair(-l) for l in lits if l < 0])


def verify(cnf: Cnf, events: Iterable[ProofEvent] | Iterable[str],
           base: Optional[RaySet] = None, results: Optional[Sequence[Graph]] = None,
           base_order: Optional[int] = None) -> VerifyResult:
    """Check a proof against ``cnf``; see the module docstring for the grammar.

    ``results`` are the graphs the run reported; when given, each must be
    blocked by exactly one model-blocking addition.
    """
    info = _header_info(cnf)
    p = info["base"] if base_order is None else base_order
    n = info["order"]
    db = _ClauseDB(cnf.num_vars)
    for c in cnf.clauses:
        db.add(c)
    blocked: set[str] = set()
    reported = {encode_graph6(g): False for g in (results or [])}
    base_rays = list(base) if base is not None else None
    counts = dict(add=0, delete=0, t=0, o=0, model=0, lazy010=0)
    max_lookups = 0
    empty_seen = False

    def reject(reason, ev, detail=""):
        return VerifyResult(False, reason, ev.line if ev else 0, detail, counts, max_lookups)

    ev = None
    try:
        for idx, ev in enumerate(events, 1):
            if isinstance(ev, str):
                ev = parse_line(ev, idx)
            if empty_seen:
                break
            kind = ev.kind
            if kind == "delete":
                counts["delete"] += 1
                db.delete(ev.lits)
                continue
            if kind == "add":
                counts["add"] += 1
                g = None
                m = comb(n, 2) if n is not None else -1
                if len(ev.lits) == m and sorted(abs(l) for l in ev.lits) == list(range(1, m + 1)):
                    g = Graph(n, [edge_pair(-l) for l in ev.lits if l < 0])
                key = encode_graph6(g) if g is not None else None
                if key in reported and not reported[key]:
                    # a reported model must survive unit propagation of its own edges
                    if db.rup(ev.lits):
                        return reject("model-invalid", ev, f"reported graph {key} violates the formula")
                    reported[key] = True
                    counts["model"] += 1
                elif not db.rup(ev.lits):
                    # not RUP: only an 010-colorable full edge assignment may be blocked
                    if g is None:
                        return reject("RUP-fail", ev)
                    if not (info["lazy010"] and _colorable_010(g)):
                        return reject("RUP-fail", ev, "blocks a graph that is neither reported nor 010-colorable")
                    counts["lazy010"] += 1
                db.add(ev.lits)
                if not ev.lits:
                    empty_seen = True
                continue
            if kind == "t":
                counts["t"] += 1
                g = _graph_from_prefix_clause(ev.lits)
                if g is None:
                    return reject("t-shape", ev, "literals must cover exactly the prefix variables")
                k = g.n
                img = ev.witness
                if sorted(img) != list(range(1, k + 1)):
                    return reject("t-witness-blocked", ev, "witness is not a permutation of the prefix")
                g2 = apply_perm(g, Permutation(img))
                if g2 == g:
                    return reject("t-witness-blocked", ev, "witness maps the graph to itself")
                if encode_graph6(g2) in blocked:
                    return reject("t-witness-blocked", ev, "witness image is already blocked")
                lookups = 1
                for j in range(k - 1, max(p, 2) - 1, -1):
                    lookups += 1
                    if encode_graph6(g2.prefix(j)) in blocked:
                        return reject("t-prefix-blocked", ev, f"prefix of order {j} of the image is blocked")
                max_lookups = max(max_lookups, lookups)
                blocked.add(encode_graph6(g))
                db.add(ev.lits)
                continue
            if kind == "o":
                counts["o"] += 1
                if base_rays is None:
                    return reject("o-no-base", ev, "proof has o-lines but no base rays were given")
                wit = [(max(a, b), min(a, b)) for a, b in ev.witness]
                try:
                    expect = sorted(-edge_var(b, a) for a, b in wit)
                except ValueError:
                    return reject("o-shape", ev, "bad witness edge")
                if sorted(set(ev.lits)) != sorted(set(expect)):
                    return reject("o-shape", ev, "literals do not negate the witness edges")
                known, why = _rederive(base_rays, wit)
                missing = sorted({v for e in wit for v in e if v not in known})
                if missing:
                    return reject("o-rederive-mismatch", ev, f"no coordinates for {missing}")
                if why is None:
                    return reject("o-no-contradiction", ev)
                db.add(ev.lits)
                continue
    except ProofParseError as e:
        return VerifyResult(False, "parse error", ev.line if ev else 0, str(e), counts, max_lookups)
    if not empty_seen:
        return VerifyResult(False, "no-empty-clause", ev.line if ev else 0,
                            "proof does not derive the empty clause", counts, max_lookups)
    missing = [k for k, done in reported.items() if not done]
    if missing:
        return VerifyResult(False, "model-not-blocked", 0, f"{len(missing)} reported graphs never blocked",
                            counts, max_lookups)
    return VerifyResult(True, counts=counts, max_prefix_lookups=max_lookups)


def verify_files(cnf_path, proof_path, rays_path=None, results_path=None) -> VerifyResult:
    from .graph import read_graph6_file

    cnf = Cnf.read(cnf_path)
    base = RaySet.read(rays_path) if rays_path else None
    results = read_graph6_file(results_path) if results_path else None
    with open(proof_path) as fh:
        try:
            return verify(cnf, iter_events(fh), base, results)
        except ProofParseError as e:
            return VerifyResult(False, "parse error", 0, str(e))
