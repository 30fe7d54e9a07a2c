"""Graphs the coloring game is played on.

A :class:`Graph` keeps its adjacency twice: as a dense boolean matrix (one
bit row per vertex, used by vectorized availability updates) and as CSR
neighbor lists (used by the compiled kernels that walk neighborhoods).
Both views are read-only once the graph is built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from colorgame.seeding import make_rng


class GraphFormatError(ValueError):
    """Raised when a serialized graph violates the JSON schema."""

    def __init__(self, message: str, position: str):
        super().__init__(f"{position}: {message}")
        self.position = position


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adj: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    edge_count: int

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> Graph:
        adj = np.array(adj, dtype=np.bool_, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        n = adj.shape[0]
        degrees = adj.sum(axis=1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        indices = np.nonzero(adj)[1].astype(np.int32)
        adj.setflags(write=False)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(n=n, adj=adj, indptr=indptr, indices=indices, edge_count=int(degrees.sum()) // 2)

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        if n < 1:
            raise ValueError("n must be at least 1")
        adj = np.zeros((n, n), dtype=np.bool_)
        for u, v in edges:
            adj[u, v] = adj[v, u] = True
        return cls.from_adjacency(adj)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adj, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self.adj).tobytes()))


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p).

    One uniform double is drawn per unordered pair, in row-major order over
    pairs u < v, from a PCG64 generator seeded with ``seed``; the pair is an
    edge iff the draw is below ``p``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(iu.size) < p
    adj = np.zeros((n, n), dtype=np.bool_)
    adj[iu[hit], ju[hit]] = True
    adj |= adj.T
    return Graph.from_adjacency(adj)


def bipartite_minus_matching(n: int) -> tuple[Graph, dict[int, int]]:
    """K_{n,n} minus a perfect matching.

    Sides are U = {0..n-1} and W = {n..2n-1}; u_i ~ w_j iff i != j.  The
    returned table maps every vertex to its matching partner (both ways).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    adj = np.zeros((2 * n, 2 * n), dtype=np.bool_)
    block = ~np.eye(n, dtype=np.bool_)
    adj[:n, n:] = block
    adj[n:, :n] = block
    matching = {}
    for i in range(n):
        matching[i] = n + i
        matching[n + i] = i
    return Graph.from_adjacency(adj), matching


def serialize_graph(g: Graph) -> str:
    return json.dumps({"n": g.n, "edges": [list(e) for e in g.edges()]})


def parse_graph(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise GraphFormatError("document must be an object", "$")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise GraphFormatError("'n' must be an integer", "$.n")
    if n < 1:
        raise GraphFormatError("'n' must be at least 1", "$.n")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list", "$.edges")
    seen = set()
    for idx, e in enumerate(edges):
        pos = f"$.edges[{idx}]"
        if (not isinstance(e, list) or len(e) != 2
                or any(isinstance(x, bool) or not isinstance(x, int) for x in e)):
            raise GraphFormatError("edge must be a pair of integers", pos)
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex index out of range [0, {n})", pos)
        if u == v:
            raise GraphFormatError("self-loop", pos)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError("duplicate edge", pos)
        seen.add(key)
    return Graph.from_edges(n, seen)
