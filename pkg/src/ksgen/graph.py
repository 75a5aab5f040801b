"""Labeled undirected graphs, permutations and the edge-variable map.

All public interfaces use 1-based vertex labels.  Internally a graph is a
tuple of adjacency bitmasks where bit ``j - 1`` of ``rows[i - 1]`` is set
when ``i`` and ``j`` are adjacent.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Malformed graph6 or adjacency-list input."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class Permutation:
    """A bijection on ``{1..n}`` stored as its image tuple."""

    __slots__ = ("image",)

    def __init__(self, image: Sequence[int]):
        image = tuple(int(x) for x in image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a permutation of 1..{len(image)}: {image}")
        self.image = image

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.image, 1):
            inv[x - 1] = i
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """Return ``self o other`` (apply ``other`` first)."""
        if other.n != self.n:
            raise ValueError("permutation size mismatch")
        return Permutation(self.image[x - 1] for x in other.image)

    def is_identity(self) -> bool:
        return all(x == i for i, x in enumerate(self.image, 1))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"Permutation({list(self.image)})"


class Graph:
    """Immutable simple undirected graph on vertices ``1..n``."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        rows = [0] * n
        for i, j in edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if i == j:
                raise ValueError(f"self-loop at {i}")
            rows[i - 1] |= 1 << (j - 1)
            rows[j - 1] |= 1 << (i - 1)
        self.n = n
        self.rows = tuple(rows)
        self._hash = None

    @classmethod
    def _from_rows(cls, rows: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(rows)
        g.rows = tuple(rows)
        g._hash = None
        return g

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if a.diagonal().any() or (a != a.T).any():
            raise ValueError("adjacency matrix must be symmetric with empty diagonal")
        rows = []
        for r in a:
            m = 0
            for j in np.flatnonzero(r):
                m |= 1 << int(j)
            rows.append(m)
        return cls._from_rows(rows)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(1, n + 1), 2))

    @classmethod
    def from_code(cls, n: int, code: int) -> "Graph":
        """Inverse of :meth:`code`."""
        m = comb(n, 2)
        rows = [0] * n
        pos = m - 1
        for j in range(1, n):
            for i in range(j):
                if code >> pos & 1:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                pos -= 1
        return cls._from_rows(rows)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i - 1] >> (j - 1) & 1)

    def neighbors(self, v: int) -> list[int]:
        r = self.rows[v - 1]
        return [j + 1 for j in range(self.n) if r >> j & 1]

    def degree(self, v: int) -> int:
        return bin(self.rows[v - 1]).count("1")

    def degrees(self) -> list[int]:
        return [bin(r).count("1") for r in self.rows]

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(i, j)`` with ``i < j`` in column-major order."""
        out = []
        for j in range(2, self.n + 1):
            r = self.rows[j - 1]
            for i in range(1, j):
                if r >> (i - 1) & 1:
                    out.append((i, j))
        return out

    def num_edges(self) -> int:
        return sum(bin(r).count("1") for r in self.rows) // 2

    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges():
            a[i - 1, j - 1] = a[j - 1, i - 1] = True
        return a

    def triangles(self) -> list[tuple[int, int, int]]:
        out = []
        for i, j in self.edges():
            common = self.rows[i - 1] & self.rows[j - 1] & ~((1 << j) - 1)
            k = j
            while common >> k:
                if common >> k & 1:
                    out.append((i, j, k + 1))
                k += 1
        return out

    def code(self) -> int:
        """Column-major adjacency string as an integer (first bit most significant).

        For graphs of equal order, integer order equals lexicographic order
        of the strings.
        """
        c = 0
        rows = self.rows
        for j in range(1, self.n):
            r = rows[j]
            for i in range(j):
                c = (c << 1) | (r >> i & 1)
        return c

    def adjacency_string(self) -> str:
        m = comb(self.n, 2)
        return format(self.code(), f"0{m}b") if m else ""

    def prefix(self, k: int) -> "Graph":
        return prefix(self, k)

    def apply_perm(self, p: Permutation) -> "Graph":
        return apply_perm(self, p)

    def remove_vertex(self, v: int) -> "Graph":
        """Delete ``v``; vertices above ``v`` shift down by one label."""
        if not 1 <= v <= self.n or self.n == 1:
            raise ValueError(f"cannot remove vertex {v} from graph of order {self.n}")
        low = (1 << (v - 1)) - 1
        rows = []
        for i, r in enumerate(self.rows, 1):
            if i != v:
                rows.append((r & low) | ((r >> v) << (v - 1)))
        return Graph._from_rows(rows)

    def add_vertex(self, neighbors: Iterable[int] = ()) -> "Graph":
        """Append vertex ``n + 1`` adjacent to ``neighbors``."""
        new = self.n
        rows = list(self.rows) + [0]
        for u in neighbors:
            rows[u - 1] |= 1 << new
            rows[new] |= 1 << (u - 1)
        return Graph._from_rows(rows)

    def is_connected(self) -> bool:
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= self.rows[low.bit_length() - 1]
                f ^= low
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def to_graph6(self) -> str:
        return encode_graph6(self)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"Graph({self.n}, {self.edges()})"


def prefix(g: Graph, k: int) -> Graph:
    """Induced subgraph on labels ``1..k``."""
    if not 1 <= k <= g.n:
        raise ValueError(f"prefix order {k} out of range 1..{g.n}")
    mask = (1 << k) - 1
    return Graph._from_rows([r & mask for r in g.rows[:k]])


def apply_perm(g: Graph, p: Permutation) -> Graph:
    """Relabel so that ``adj'(p(i), p(j)) = adj(i, j)``."""
    if p.n != g.n:
        raise ValueError(f"permutation of size {p.n} applied to graph of order {g.n}")
    img = [x - 1 for x in p.image]
    rows = [0] * g.n
    for i, r in enumerate(g.rows):
        m = 0
        while r:
            low = r & -r
            m |= 1 << img[low.bit_length() - 1]
            r ^= low
        rows[img[i]] = m
    return Graph._from_rows(rows)


def induced(g: Graph, vertices: Sequence[int]) -> Graph:
    """Induced subgraph; ``vertices[t]`` becomes label ``t + 1``."""
    idx = [v - 1 for v in vertices]
    rows = []
    for a in idx:
        r = g.rows[a]
        m = 0
        for t, b in enumerate(idx):
            if r >> b & 1:
                m |= 1 << t
        rows.append(m)
    return Graph._from_rows(rows)


class EdgeVarMap:
    """Column-major numbering of vertex pairs: ``(i, j) -> C(j-1, 2) + i``.

    All pairs inside ``{1..k}`` occupy exactly the first ``C(k, 2)`` indices.
    """

    def __init__(self, n: int):
        self.n = n
        self.num_vars = comb(n, 2)

    def var(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if i == j or i < 1 or j > self.n:
            raise ValueError(f"no edge variable for pair ({i},{j}) with n={self.n}")
        return (j - 1) * (j - 2) // 2 + i

    __call__ = var

    def pair(self, var: int) -> tuple[int, int]:
        if not 1 <= var <= self.num_vars:
            raise ValueError(f"edge variable {var} out of range")
        j = 2
        while comb(j, 2) < var:
            j += 1
        return var - comb(j - 1, 2), j

    def prefix_size(self, k: int) -> int:
        return comb(k, 2)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for j in range(2, self.n + 1):
            for i in range(1, j):
                yield i, j


def edge_var(i: int, j: int) -> int:
    """Edge variable of the pair ``{i, j}``; independent of the graph order."""
    if i >= j:
        raise ValueError(f"edge_var needs i < j, got ({i},{j})")
    if i < 1:
        raise ValueError("labels are 1-based")
    return (j - 1) * (j - 2) // 2 + i


def edge_pair(var: int) -> tuple[int, int]:
    """Inverse of :func:`edge_var`."""
    if var < 1:
        raise ValueError(f"edge variables start at 1, got {var}")
    j = 2
    while (j - 1) * j // 2 < var:
        j += 1
    return var - (j - 1) * (j - 2) // 2, j


# -- graph6 ---------------------------------------------------------------


def _encode_n(n: int) -> str:
    if n < 63:
        return chr(n + 63)
    if n < 258048:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    raise ValueError("graph too large for graph6")


def encode_graph6(g: Graph) -> str:
    bits = []
    rows = g.rows
    for j in range(1, g.n):
        r = rows[j]
        for i in range(j):
            bits.append(r >> i & 1)
    bits.extend([0] * (-len(bits) % 6))
    out = [_encode_n(g.n)]
    for t in range(0, len(bits), 6):
        v = 0
        for b in bits[t:t + 6]:
            v = (v << 1) | b
        out.append(chr(v + 63))
    return "".join(out)


def decode_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[10:]
    data = s.encode("ascii", errors="replace")
    for off, c in enumerate(data):
        if not 63 <= c <= 126:
            raise GraphFormatError(f"invalid graph6 character {chr(c)!r}", off)
    if not data:
        raise GraphFormatError("empty graph6 string", 0)
    if data[0] != 126:
        n, pos = data[0] - 63, 1
    else:
        if len(data) < 4 or data[1] == 126:
            raise GraphFormatError("unsupported or truncated graph6 size field", 1)
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        pos = 4
    if n < 1:
        raise GraphFormatError("graph6 order must be at least 1", 0)
    m = comb(n, 2)
    need = (m + 5) // 6
    if len(data) - pos != need:
        raise GraphFormatError(
            f"expected {need} data bytes for n={n}, found {len(data) - pos}",
            min(len(data), pos + need))
    rows = [0] * n
    t = 0
    i, j = 0, 1
    for off in range(pos, pos + need):
        v = data[off] - 63
        for s in range(5, -1, -1):
            if t >= m:
                if v >> s & 1:
                    raise GraphFormatError("nonzero padding bits", off)
                continue
            if v >> s & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            t += 1
            i += 1
            if i == j:
                i, j = 0, j + 1
    return Graph._from_rows(rows)


def read_graph6_file(path) -> list[Graph]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if line:
                try:
                    out.append(decode_graph6(line))
                except GraphFormatError as e:
                    raise GraphFormatError(f"{path}: line {lineno}: {e}") from None
    return out


def write_graph6_file(path, graphs: Iterable[Graph]) -> None:
    with open(path, "w") as fh:
        for g in graphs:
            fh.write(encode_graph6(g) + "\n")


# -- adjacency-list text ---------------------------------------------------


def to_adjacency_list(g: Graph) -> str:
    """Human-readable dump: header ``n`` then ``v: u1 u2 ...`` per vertex."""
    lines = [f"n {g.n}"]
    for v in range(1, g.n + 1):
        lines.append(f"{v}: " + " ".join(map(str, g.neighbors(v))))
    return "\n".join(lines) + "\n"


def from_adjacency_list(text: str) -> Graph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("n "):
        raise GraphFormatError("adjacency list must start with 'n <order>'")
    n = int(lines[0].split()[1])
    edges = set()
    for ln in lines[1:]:
        head, _, rest = ln.partition(":")
        v = int(head)
        for tok in rest.split():
            u = int(tok)
            edges.add((min(u, v), max(u, v)))
    return Graph(n, edges)
