"""Immutable simple graphs and bipartite graphs.

Vertices are dense integer ids ``0..n-1``.  Every graph also carries a
``labels`` array mapping each local id to the id it had in the *root* input,
so any subgraph produced by a pipeline can be checked against the graph the
user supplied (see :func:`is_subgraph_of`).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError

__all__ = [
    "Graph",
    "BipartiteGraph",
    "DegreeSummary",
    "degree_summary",
    "side_summary",
    "bipartite_half",
    "two_coloring",
    "min_degree_peel",
    "dyadic_degree_classes",
    "is_subgraph_of",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Graph:
    """Simple undirected graph with sorted edge array ``edges[i] = (u, v)``, ``u < v``."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] | np.ndarray = (),
                 labels: Sequence[int] | np.ndarray | None = None, *, _trusted: bool = False):
        if n < 0:
            raise PreconditionError("vertex count must be nonnegative")
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if not _trusted and len(arr):
            arr = np.sort(arr, axis=1)
            if (arr[:, 0] == arr[:, 1]).any():
                raise PreconditionError("loops are not allowed")
            if arr.min() < 0 or arr.max() >= n:
                raise PreconditionError("edge endpoint out of range")
            keys = arr[:, 0] * n + arr[:, 1]
            order = np.argsort(keys, kind="stable")
            keys = keys[order]
            if (np.diff(keys) == 0).any():
                raise PreconditionError("multi-edges are not allowed")
            arr = arr[order]
        self._n = int(n)
        self._edges = _frozen(np.ascontiguousarray(arr))
        if labels is None:
            lab = np.arange(n, dtype=np.int64)
        else:
            lab = np.asarray(labels, dtype=np.int64)
            if lab.shape != (n,):
                raise PreconditionError("labels must have one entry per vertex")
        self._labels = _frozen(lab)

    # -- basic accessors -------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self._edges]

    @cached_property
    def origin(self) -> np.ndarray:
        """Map from local ids to ids of the graph this one was restricted from."""
        return _frozen(np.arange(self._n, dtype=np.int64))

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.bincount(self._edges.ravel(), minlength=self._n).astype(np.int64))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self._n)]
        for u, v in self._edges.tolist():
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        return self._edges[:, 0] * max(self._n, 1) + self._edges[:, 1]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        u, v = min(u, v), max(u, v)
        key = u * max(self._n, 1) + v
        i = np.searchsorted(self._edge_keys, key)
        return bool(i < len(self._edge_keys) and self._edge_keys[i] == key)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self._n else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self._n else 0

    @property
    def average_degree(self) -> Fraction:
        if self._n == 0:
            raise PreconditionError("average degree of the empty graph is undefined")
        return Fraction(2 * self.m, self._n)

    # -- subgraphs -------------------------------------------------------
    def restrict(self, vertices: Iterable[int] | np.ndarray | None = None,
                 edge_mask: np.ndarray | None = None) -> "Graph":
        """Subgraph on ``vertices`` keeping edges with both ends kept (and ``edge_mask`` set).

        Kept vertices are renumbered in increasing order; ``origin`` on the
        result maps new ids to ids of ``self``.
        """
        if vertices is None:
            kept = np.arange(self._n, dtype=np.int64)
        else:
            kept = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray)
                                        else vertices, dtype=np.int64))
        new_id = np.full(self._n, -1, dtype=np.int64)
        new_id[kept] = np.arange(len(kept))
        mapped = new_id[self._edges] if len(self._edges) else self._edges.reshape(0, 2)
        mask = (mapped >= 0).all(axis=1) if len(mapped) else np.zeros(0, dtype=bool)
        if edge_mask is not None:
            mask &= np.asarray(edge_mask, dtype=bool)
        sub = Graph(len(kept), mapped[mask], self._labels[kept], _trusted=True)
        sub.__dict__["origin"] = _frozen(kept)
        return sub

    def induced(self, vertices: Iterable[int]) -> "Graph":
        return self.restrict(vertices)

    def edge_subgraph(self, edge_mask: np.ndarray | Sequence[bool]) -> "Graph":
        """Subgraph formed by the selected edges and their endpoints (no isolated vertices)."""
        edge_mask = np.asarray(edge_mask, dtype=bool)
        verts = np.unique(self._edges[edge_mask].ravel())
        return self.restrict(verts, edge_mask)

    def edges_from_pairs(self, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
        """Boolean edge mask selecting the given vertex pairs (which must be edges)."""
        mask = np.zeros(self.m, dtype=bool)
        width = max(self._n, 1)
        keys = np.array([min(u, v) * width + max(u, v) for u, v in pairs], dtype=np.int64)
        if len(keys):
            idx = np.searchsorted(self._edge_keys, keys)
            ok = (idx < self.m)
            ok[ok] &= self._edge_keys[idx[ok]] == keys[ok]
            if not ok.all():
                raise PreconditionError("pair is not an edge of the graph")
            mask[idx] = True
        return mask

    def root_edges(self) -> set[tuple[int, int]]:
        lab = self._labels[self._edges] if len(self._edges) else self._edges
        lo = np.minimum(lab[:, 0], lab[:, 1]) if len(lab) else lab
        hi = np.maximum(lab[:, 0], lab[:, 1]) if len(lab) else lab
        return set(zip(lo.tolist(), hi.tolist())) if len(lab) else set()

    # -- misc ------------------------------------------------------------
    def relabeled_as_root(self) -> "Graph":
        """Same graph with labels reset so that it becomes its own root."""
        return Graph(self._n, self._edges, _trusted=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self._n == other._n and np.array_equal(self._edges, other._edges)
                and np.array_equal(self._labels, other._labels))

    def __hash__(self) -> int:
        return hash((self._n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


class BipartiteGraph:
    """A :class:`Graph` together with a side assignment (0 = part A, 1 = part B)."""

    def __init__(self, graph: Graph, side: Sequence[int] | np.ndarray):
        side_arr = np.asarray(side, dtype=np.int8)
        if side_arr.shape != (graph.n,):
            raise PreconditionError("side must assign every vertex")
        if len(side_arr) and not np.isin(side_arr, (0, 1)).all():
            raise PreconditionError("side entries must be 0 or 1")
        if graph.m and (side_arr[graph.edges[:, 0]] == side_arr[graph.edges[:, 1]]).any():
            raise PreconditionError("edge inside one part")
        self.graph = graph
        self.side = _frozen(side_arr)

    @classmethod
    def from_parts(cls, n_a: int, n_b: int, edges: Iterable[Sequence[int]]) -> "BipartiteGraph":
        """A-ids ``0..n_a-1``, B-ids ``n_a..n_a+n_b-1``."""
        side = np.concatenate([np.zeros(n_a, dtype=np.int8), np.ones(n_b, dtype=np.int8)])
        return cls(Graph(n_a + n_b, edges), side)

    @classmethod
    def complete(cls, n_a: int, n_b: int) -> "BipartiteGraph":
        return cls.from_parts(n_a, n_b, [(a, n_a + b) for a in range(n_a) for b in range(n_b)])

    @cached_property
    def part_a(self) -> np.ndarray:
        return _frozen(np.flatnonzero(self.side == 0))

    @cached_property
    def part_b(self) -> np.ndarray:
        return _frozen(np.flatnonzero(self.side == 1))

    def part(self, which: int | str) -> np.ndarray:
        return self.part_a if which in (0, "A", "a") else self.part_b

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def degrees(self) -> np.ndarray:
        return self.graph.degrees

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.graph.adjacency[v]

    def swapped(self) -> "BipartiteGraph":
        return BipartiteGraph(self.graph, 1 - self.side)

    def restrict(self, vertices=None, edge_mask=None) -> "BipartiteGraph":
        sub = self.graph.restrict(vertices, edge_mask)
        return BipartiteGraph(sub, self.side[sub.origin])

    def edge_subgraph(self, edge_mask) -> "BipartiteGraph":
        sub = self.graph.edge_subgraph(edge_mask)
        return BipartiteGraph(sub, self.side[sub.origin])

    def on(self, sub: Graph) -> "BipartiteGraph":
        """Attach this graph's sides to ``sub``, a subgraph sharing the same root labels."""
        lookup = dict(zip(self.graph.labels.tolist(), self.side.tolist()))
        try:
            side = [lookup[int(x)] for x in sub.labels]
        except KeyError as exc:
            raise PreconditionError("graph is not a subgraph of this bipartite graph") from exc
        return BipartiteGraph(sub, side)

    def __repr__(self) -> str:
        return f"BipartiteGraph(|A|={len(self.part_a)}, |B|={len(self.part_b)}, m={self.m})"


@dataclass(frozen=True)
class DegreeSummary:
    min_deg: int
    max_deg: int
    avg_deg: Fraction

    def ratio(self) -> float:
        return math.inf if self.min_deg == 0 else self.max_deg / self.min_deg


def degree_summary(g: Graph | BipartiteGraph) -> DegreeSummary:
    if isinstance(g, BipartiteGraph):
        g = g.graph
    if g.n == 0:
        raise PreconditionError("degree summary of an empty graph")
    return DegreeSummary(g.min_degree, g.max_degree, g.average_degree)


def side_summary(h: BipartiteGraph, which: int | str = "A") -> DegreeSummary:
    """Degree statistics of one part; the average is e(h) / |part|."""
    verts = h.part(which)
    if len(verts) == 0:
        raise PreconditionError("empty part")
    deg = h.degrees[verts]
    return DegreeSummary(int(deg.min()), int(deg.max()), Fraction(h.m, len(verts)))


def two_coloring(g: Graph) -> BipartiteGraph:
    """Proper 2-coloring by BFS, lowest id of each component on side A."""
    side = _bfs_sides(g)
    if g.m and (side[g.edges[:, 0]] == side[g.edges[:, 1]]).any():
        raise PreconditionError("graph is not bipartite")
    return BipartiteGraph(g, side)


def _bfs_sides(g: Graph) -> np.ndarray:
    side = np.full(g.n, -1, dtype=np.int8)
    adj = g.adjacency
    for root in range(g.n):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    queue.append(w)
    return side


def bipartite_half(g: Graph) -> BipartiteGraph:
    """Spanning bipartite subgraph keeping at least half of the edges.

    Starts from a BFS 2-coloring (exact for bipartite inputs) and flips single
    vertices while that strictly increases the cut. At a local optimum every
    vertex has at least half of its edges crossing, hence the cut is >= e/2.
    """
    if g.m == 0:
        raise PreconditionError("bipartite_half needs at least one edge")
    side = _bfs_sides(g).astype(np.int64)
    adj = g.adjacency
    same = np.array([sum(1 for w in adj[v] if side[w] == side[v]) for v in range(g.n)])
    deg = g.degrees
    queue = deque(int(v) for v in np.flatnonzero(2 * same > deg))
    while queue:
        v = queue.popleft()
        if 2 * same[v] <= deg[v]:
            continue
        side[v] ^= 1
        same[v] = deg[v] - same[v]
        for w in adj[v]:
            if side[w] == side[v]:
                same[w] += 1
                if 2 * same[w] > deg[w]:
                    queue.append(w)
            else:
                same[w] -= 1
    crossing = side[g.edges[:, 0]] != side[g.edges[:, 1]]
    return BipartiteGraph(g.restrict(None, crossing), side)


def min_degree_peel(g: Graph | BipartiteGraph, threshold) -> Graph | BipartiteGraph:
    """Largest subgraph with minimum degree >= ``threshold`` (possibly empty).

    Repeatedly deletes vertices whose degree falls below the threshold; the
    result does not depend on deletion order. Returns the same type as ``g``.
    """
    if threshold < 0:
        raise PreconditionError("threshold must be nonnegative")
    host = g.graph if isinstance(g, BipartiteGraph) else g
    k = math.ceil(threshold)
    deg = host.degrees.copy()
    alive = np.ones(host.n, dtype=bool)
    adj = host.adjacency
    queue = deque(int(v) for v in np.flatnonzero(deg < k))
    for v in queue:
        alive[v] = False
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < k:
                    alive[w] = False
                    queue.append(w)
    keep = np.flatnonzero(alive)
    return g.restrict(keep)


def dyadic_degree_classes(h: BipartiteGraph, thresholds: Sequence[float]) -> list[tuple[int, ...]]:
    """Partition part A by degree: ``d <= 2^t0``, then ``2^t(i-1) < d <= 2^t(i)``.

    Thresholds are exponents and must be strictly increasing. Degrees above
    ``2^t_last`` are placed in the last class so the output always covers A.
    """
    ts = [float(t) for t in thresholds]
    if not ts:
        raise PreconditionError("need at least one threshold")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise PreconditionError("thresholds must be strictly increasing")
    classes: list[list[int]] = [[] for _ in ts]
    for u in h.part_a.tolist():
        d = int(h.degrees[u])
        lg = -math.inf if d == 0 else math.log2(d)
        idx = next((i for i, t in enumerate(ts) if lg <= t), len(ts) - 1)
        classes[idx].append(u)
    return [tuple(c) for c in classes]


def is_subgraph_of(sub: Graph | BipartiteGraph, host: Graph | BipartiteGraph) -> bool:
    """True if every edge of ``sub`` (in root labels) is an edge of ``host``."""
    if isinstance(sub, BipartiteGraph):
        sub = sub.graph
    if isinstance(host, BipartiteGraph):
        host = host.graph
    if not set(sub.labels.tolist()) <= set(host.labels.tolist()):
        return False
    return sub.root_edges() <= host.root_edges()
