"""Isomorph-free SAT-based generation of Kochen-Specker candidate graphs.

Modules: ``graph`` (graphs, permutations, graph6), ``canon`` (canonical
labelings), ``sat`` (CDCL solver with propagator hooks), ``encode`` (the
CNF encoding and 010 checks), ``geom`` (exact ray arithmetic), ``search``
(the generation loop), ``proof`` (extended DRAT proofs) and ``bench``.
"""

from .graph import Graph, Permutation, decode_graph6, encode_graph6
from .canon import base_canon, is_rcl_canonical, lex_check, rcl_canon
from .sat import Cnf, solve
from .geom import RaySet, closure, orthogonality_graph
from .encode import check_010, encode
from .search import SearchConfig, run_search
from .proof import verify

__version__ = "0.1.0"

__all__ = [
    "Graph", "Permutation", "decode_graph6", "encode_graph6",
    "base_canon", "rcl_canon", "is_rcl_canonical", "lex_check",
    "Cnf", "solve", "RaySet", "closure", "orthogonality_graph",
    "check_010", "encode", "SearchConfig", "run_search", "verify",
]
