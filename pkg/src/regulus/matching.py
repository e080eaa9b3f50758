"""Bipartite matchings, Hall tight sets and regular-bipartite peeling."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

import networkx as nx
import numpy as np

from .errors import ConsistencyError, PreconditionError
from .graph import BipartiteGraph

__all__ = [
    "Matching",
    "TightSet",
    "max_matching",
    "minimal_tight_set",
    "perfect_matching_on",
    "regular_bipartite_peel",
    "neighborhood",
]


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint edges stored as ``(a, b)`` with ``a`` on the searched side."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def mate(self) -> dict[int, int]:
        out = {}
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out

    def is_valid_in(self, h: BipartiteGraph) -> bool:
        seen = [v for e in self.pairs for v in e]
        return len(seen) == len(set(seen)) and all(h.graph.has_edge(a, b) for a, b in self.pairs)

    def edge_mask(self, h: BipartiteGraph) -> np.ndarray:
        return h.graph.edges_from_pairs(self.pairs)


@dataclass(frozen=True)
class TightSet:
    members: tuple[int, ...]
    neighborhood: tuple[int, ...]


def neighborhood(h: BipartiteGraph, verts) -> set[int]:
    adj = h.graph.adjacency
    out: set[int] = set()
    for v in verts:
        out.update(adj[v])
    return out


def _hopcroft_karp(adj: dict[int, tuple[int, ...]], left: list[int]) -> dict[int, int]:
    """Maximum matching from ``left``; returns mate map on the left side only."""
    mate_l: dict[int, int] = {}
    mate_r: dict[int, int] = {}
    inf = len(left) + 1
    while True:
        # BFS layering from free left vertices
        dist: dict[int, int] = {}
        queue = deque()
        for u in left:
            if u not in mate_l:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                x = mate_r.get(w)
                if x is None:
                    found = True
                elif x not in dist:
                    dist[x] = dist[u] + 1
                    queue.append(x)
        if not found:
            return mate_l
        # iterative DFS along the layers
        for root in left:
            if root in mate_l:
                continue
            stack = [(root, iter(adj[root]))]
            path: list[tuple[int, int]] = []
            while stack:
                u, it = stack[-1]
                advanced = False
                for w in it:
                    x = mate_r.get(w)
                    if x is None:
                        path.append((u, w))
                        for a, b in path:
                            mate_l[a] = b
                            mate_r[b] = a
                        stack.clear()
                        advanced = True
                        break
                    if dist.get(x, inf) == dist[u] + 1:
                        path.append((u, w))
                        stack.append((x, iter(adj[x])))
                        advanced = True
                        break
                if not advanced:
                    dist[u] = inf
                    stack.pop()
                    if path:
                        path.pop()


def max_matching(h: BipartiteGraph, from_side: int | str = "A") -> Matching:
    """Maximum-cardinality matching (Hopcroft-Karp), pairs oriented ``(from_side, other)``."""
    left = h.part(from_side).tolist()
    adj = h.graph.adjacency
    mate = _hopcroft_karp({u: adj[u] for u in left}, left)
    return Matching(tuple(sorted(mate.items())))


def minimal_tight_set(h: BipartiteGraph, from_side: int | str = "A") -> TightSet:
    """Inclusion-minimal nonempty ``S`` on one side with ``|N(S)| <= |S|``.

    Shrinks the side while Hall's condition fails, then, once a perfect
    matching ``M`` between ``S`` and ``N(S)`` exists, returns a sink strongly
    connected component of the digraph ``a -> M^-1(b)`` for ``b in N(a)``.
    Closed sets of that digraph are exactly the tight subsets, so a sink
    component is minimal. Ties are broken towards the smallest vertex id.
    """
    side_verts = h.part(from_side).tolist()
    adj = h.graph.adjacency
    if not side_verts:
        raise PreconditionError("chosen side is empty")
    if any(len(adj[u]) == 0 for u in side_verts):
        raise PreconditionError("every vertex on the chosen side needs degree >= 1")
    nbhd = neighborhood(h, side_verts)
    if len(nbhd) > len(side_verts):
        raise PreconditionError(
            f"|N(S)| = {len(nbhd)} exceeds |S| = {len(side_verts)} for the full side")

    S = sorted(side_verts)
    while True:
        mate = _hopcroft_karp({u: adj[u] for u in S}, S)
        if len(mate) < len(S):
            free = next(u for u in S if u not in mate)
            mate_r = {b: a for a, b in mate.items()}
            reach = {free}
            queue = deque([free])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    x = mate_r.get(w)
                    if x is not None and x not in reach:
                        reach.add(x)
                        queue.append(x)
            reach.discard(free)
            S = sorted(reach)
            continue
        mate_r = {b: a for a, b in mate.items()}
        dg = nx.DiGraph()
        dg.add_nodes_from(S)
        for a in S:
            for b in adj[a]:
                if b != mate[a]:
                    dg.add_edge(a, mate_r[b])
        cond = nx.condensation(dg)
        sinks = [sorted(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]
        best = min(sinks, key=lambda comp: comp[0])
        return TightSet(tuple(best), tuple(sorted(neighborhood(h, best))))


def perfect_matching_on(h: BipartiteGraph, s: TightSet) -> Matching:
    """Perfect matching between a tight set and its neighborhood."""
    adj = h.graph.adjacency
    members = list(s.members)
    if set(s.neighborhood) != neighborhood(h, members) or len(s.neighborhood) != len(members):
        raise PreconditionError("not a valid tight set of this graph")
    mate = _hopcroft_karp({u: adj[u] for u in members}, members)
    if len(mate) != len(members):
        raise ConsistencyError("Hall's condition failed on a minimal tight set")
    return Matching(tuple(sorted(mate.items())))


def regular_bipartite_peel(h: BipartiteGraph, s: int, r: int) -> BipartiteGraph:
    """Remove ``s - r`` perfect matchings from an ``s``-regular bipartite graph."""
    if not 1 <= r <= s:
        raise PreconditionError(f"need 1 <= r <= s, got r={r}, s={s}")
    if h.n == 0 or not (h.degrees == s).all():
        raise PreconditionError(f"input is not {s}-regular")
    cur = h
    for _ in range(s - r):
        m = max_matching(cur)
        if 2 * len(m) != cur.n:
            raise ConsistencyError("regular bipartite graph without a perfect matching")
        cur = cur.restrict(None, ~m.edge_mask(cur))
    return cur
