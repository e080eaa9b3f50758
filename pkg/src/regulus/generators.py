"""Seeded random instances for tests, experiments and the regression corpus."""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .graph import BipartiteGraph, Graph
from .matching import _hopcroft_karp

__all__ = [
    "gnp",
    "random_bipartite",
    "random_regular_bipartite",
    "random_tree",
    "cycle",
    "complete",
    "path",
    "star",
    "petersen",
]


def gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(n, np.stack([iu[keep], ju[keep]], axis=1), _trusted=True)


def random_bipartite(n_a: int, n_b: int, p: float, rng: np.random.Generator) -> BipartiteGraph:
    mask = rng.random((n_a, n_b)) < p
    a, b = np.nonzero(mask)
    return BipartiteGraph.from_parts(n_a, n_b, np.stack([a, b + n_a], axis=1))


def random_regular_bipartite(half: int, s: int, rng: np.random.Generator) -> BipartiteGraph:
    """s-regular bipartite graph on ``half + half`` vertices.

    Union of ``s`` perfect matchings, each a maximum matching of the remaining
    complement found with randomly shuffled adjacency lists. The complement
    stays regular, so a perfect matching always exists.
    """
    if not 0 <= s <= half:
        raise PreconditionError("need 0 <= s <= half")
    free = np.ones((half, half), dtype=bool)
    for _ in range(s):
        left = rng.permutation(half).tolist()
        adj = {}
        for a in left:
            nb = np.flatnonzero(free[a])
            adj[a] = tuple((rng.permutation(nb) + half).tolist())
        mate = _hopcroft_karp(adj, left)
        for a, b in mate.items():
            free[a, b - half] = False
    a, b = np.nonzero(~free)
    return BipartiteGraph.from_parts(half, half, np.stack([a, b + half], axis=1))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    if n < 1:
        raise PreconditionError("tree needs a vertex")
    parents = [int(rng.integers(0, v)) for v in range(1, n)]
    return Graph(n, [(p, v) for v, p in zip(range(1, n), parents)])


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)
