"""Single-line proof mutations, kept only when an oracle says they are invalid.

Three families:

* literal flips.  On learned additions the flipped clause must not be
  implied by the formula plus every earlier axiom line (checked with a SAT
  call).  On o-lines any flip breaks the clause/witness correspondence.
* witness corruption on t-lines (not a bijection, the identity, or an
  isomorphism onto an already blocked graph) and on o-lines (an edge the
  clause does not mention).
* line deletions, kept when the formula plus the remaining axiom lines is
  satisfiable, so no refutation can exist.

Axiom lines are the ones a checker cannot derive by unit propagation: t-
and o-lines and full edge-assignment blocks of reported or 010-colorable
graphs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Optional

import oracles
from ksgen.canon import rcl_canon
from ksgen.graph import Graph, apply_perm, edge_pair
from ksgen.sat import Cnf, solve


@dataclass
class ProofCase:
    name: str
    cnf: Cnf
    lines: list[str]
    base: object = None
    results: Optional[list] = None


@dataclass
class Mutant:
    case: ProofCase
    kind: str
    index: int
    lines: list[str]


def _split(line):
    toks = line.split()
    kind = "add"
    if toks[0] in ("d", "t", "o"):
        kind, toks = toks[0], toks[1:]
    nums = [int(t) for t in toks]
    z = nums.index(0)
    return kind, nums[:z], nums[z + 1:-1] if kind in ("t", "o") else []


def _order(cnf):
    for c in cnf.comments:
        p = c.split()
        if p[:1] == ["order"] and len(p) == 2:
            return int(p[1])
    return None


def _lazy(cnf):
    return any(c.startswith("hooks") and "lazy010=1" in c for c in cnf.comments)


def _full_block_graph(lits, n):
    if n is None:
        return None
    m = comb(n, 2)
    if len(lits) != m or sorted(abs(l) for l in lits) != list(range(1, m + 1)):
        return None
    return Graph(n, [edge_pair(-l) for l in lits if l < 0])


def axiom_flags(case: ProofCase) -> list[bool]:
    n = _order(case.cnf)
    lazy = _lazy(case.cnf)
    reported = set(case.results or [])
    flags = []
    for line in case.lines:
        kind, lits, _ = _split(line)
        if kind in ("t", "o"):
            flags.append(True)
        elif kind == "add":
            g = _full_block_graph(lits, n)
            flags.append(g is not None and (g in reported or (lazy and oracles.has_010_coloring(g))))
        else:
            flags.append(False)
    return flags


def _sat_with(cnf, extra):
    f = cnf.copy()
    for c in extra:
        if not c:
            return False
        f.add(c)
    return solve(f).status == "SAT"


def _clause(line):
    return _split(line)[1]


def _has_empty(lines):
    return any(_split(l)[0] == "add" and not _split(l)[1] for l in lines)


def deletion_is_invalid(case, flags, i) -> bool:
    rest = [l for j, l in enumerate(case.lines) if j != i]
    if not _has_empty(rest):
        return True
    axioms = [_clause(l) for j, l in enumerate(case.lines) if j != i and flags[j]]
    return _sat_with(case.cnf, axioms)


def flip_is_invalid(case, flags, i, new_clause) -> bool:
    prior = [_clause(l) for j, l in enumerate(case.lines[:i]) if flags[j]]
    return _sat_with(case.cnf, prior + [[-l] for l in new_clause])


def _fmt(kind, lits, wit=None):
    body = " ".join(map(str, lits + [0]))
    if kind == "add":
        return body + "\n"
    return f"{kind} {body} {' '.join(map(str, wit + [0]))}\n"


def _blocked_graph(lits):
    m = len(lits)
    k = 2
    while comb(k, 2) < m:
        k += 1
    return Graph(k, [edge_pair(-l) for l in lits if l < 0])


def make_mutants(case: ProofCase, rng: random.Random, per_kind: int = 10):
    """Candidate mutants with their oracle verdicts: ``(mutant, is_invalid)``."""
    flags = axiom_flags(case)
    lines = case.lines
    n = _order(case.cnf)
    parsed = [_split(l) for l in lines]
    learned = [i for i, (k, lits, _) in enumerate(parsed)
               if k == "add" and lits and not flags[i] and _full_block_graph(lits, n) is None]
    tl = [i for i, p in enumerate(parsed) if p[0] == "t"]
    ol = [i for i, p in enumerate(parsed) if p[0] == "o"]
    out = []

    def put(kind, i, new_line, invalid):
        ml = list(lines)
        if new_line is None:
            del ml[i]
        else:
            ml[i] = new_line
        out.append((Mutant(case, kind, i, ml), invalid))

    for i in rng.sample(learned, min(per_kind, len(learned))):
        lits = list(parsed[i][1])
        j = rng.randrange(len(lits))
        lits[j] = -lits[j]
        put("flip-add", i, _fmt("add", lits), flip_is_invalid(case, flags, i, lits))
    for i in rng.sample(ol, min(per_kind, len(ol))):
        _, lits, wit = parsed[i]
        lits = list(lits)
        j = rng.randrange(len(lits))
        lits[j] = -lits[j]
        put("flip-o", i, _fmt("o", lits, wit), True)
    for i in rng.sample(ol, min(per_kind, len(ol))):
        _, lits, wit = parsed[i]
        wit = list(wit)
        edges = {(max(a, b), min(a, b)) for a, b in zip(wit[::2], wit[1::2])}
        j = 2 * rng.randrange(len(wit) // 2)
        a = wit[j]
        b = next(x for x in range(1, max(wit) + 2) if x != a and (max(a, x), min(a, x)) not in edges)
        wit[j + 1] = b
        put("witness-o", i, _fmt("o", list(lits), wit), True)
    forms = {}

    def form(g):
        if g not in forms:
            forms[g] = rcl_canon(g)
        return forms[g]

    blocked = [_blocked_graph(parsed[i][1]) for i in tl]
    for t in rng.sample(range(len(tl)), min(per_kind, len(tl))):
        i = tl[t]
        _, lits, img = parsed[i]
        g = blocked[t]
        if len(img) >= 2 and rng.random() < 0.5:
            bad = list(img)
            bad[0] = bad[1]
            put("witness-dup", i, _fmt("t", list(lits), bad), True)
        else:
            put("witness-identity", i, _fmt("t", list(lits), list(range(1, g.n + 1))), True)
    redirects = 0
    for t in range(len(tl)):
        if redirects >= per_kind:
            break
        g = blocked[t]
        for h in blocked[:t]:
            if h != g and h.n == g.n and form(h).canonical_graph == form(g).canonical_graph:
                sigma = form(h).labeling.inverse().compose(form(g).labeling)
                assert apply_perm(g, sigma) == h
                put("witness-redirect", tl[t], _fmt("t", list(parsed[tl[t]][1]), list(sigma.image)), True)
                redirects += 1
                break
    cands = [i for i, p in enumerate(parsed) if p[0] != "d"]
    for i in rng.sample(cands, min(3 * per_kind, len(cands))):
        put("delete-" + parsed[i][0], i, None, deletion_is_invalid(case, flags, i))
    return out
