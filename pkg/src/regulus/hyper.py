"""Regular sub-multi-hypergraphs from sunflowers of perfect matchings.

If ``r`` matchings all span the same vertex set ``U`` and form a sunflower
(as sets of edge ids), deleting the shared core edges leaves every vertex of
``U`` in either ``r`` distinct edges or none: an r-regular
sub-multi-hypergraph. Bipartite graphs whose B-side is r-regular translate
to r-uniform multi-hypergraphs on A and back.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT, ConstantsConfig
from .errors import ConsistencyError, PreconditionError, SearchBudgetExceeded
from .graph import BipartiteGraph

__all__ = [
    "MultiHypergraph",
    "HyperMatching",
    "Sunflower",
    "enumerate_matchings",
    "matching_count_bound",
    "find_sunflower",
    "rao_threshold",
    "regular_subhypergraph",
    "is_regular_hypergraph",
    "bipartite_to_hyper",
    "hyper_to_bipartite_regular",
]


class MultiHypergraph:
    """r-uniform multi-hypergraph on ``0..N-1``; edge ids are positions in ``edges``.

    ``vertex_labels`` and ``edge_labels`` record provenance (for instance the
    A-vertex and B-vertex ids of a bipartite graph).
    """

    def __init__(self, r: int, n_vertices: int, edges: Iterable[Sequence[int]],
                 vertex_labels: Sequence[int] | None = None,
                 edge_labels: Sequence[int] | None = None):
        if r < 1 or n_vertices < 0:
            raise PreconditionError("need r >= 1 and N >= 0")
        norm = []
        for e in edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != r or len(set(t)) != r:
                raise PreconditionError(f"edge {e} does not have {r} distinct vertices")
            if t and (t[0] < 0 or t[-1] >= n_vertices):
                raise PreconditionError(f"edge {e} has a vertex out of range")
            norm.append(t)
        self.r = r
        self.n_vertices = n_vertices
        self.edges: tuple[tuple[int, ...], ...] = tuple(norm)
        self.vertex_labels = tuple(range(n_vertices)) if vertex_labels is None else tuple(
            int(x) for x in vertex_labels)
        self.edge_labels = tuple(range(len(norm))) if edge_labels is None else tuple(
            int(x) for x in edge_labels)
        if len(self.vertex_labels) != n_vertices or len(self.edge_labels) != len(norm):
            raise PreconditionError("label arrays have the wrong length")

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for e in self.edges:
            deg[list(e)] += 1
        return deg

    @property
    def average_degree(self) -> Fraction:
        if self.n_vertices == 0:
            raise PreconditionError("average degree of an empty hypergraph")
        return Fraction(self.r * self.m, self.n_vertices)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n_vertices else 0

    def sub(self, edge_ids: Iterable[int]) -> "MultiHypergraph":
        """Same vertex set, selected edges (kept in increasing id order)."""
        ids = sorted(set(edge_ids))
        return MultiHypergraph(self.r, self.n_vertices, [self.edges[i] for i in ids],
                               self.vertex_labels, [self.edge_labels[i] for i in ids])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiHypergraph):
            return NotImplemented
        return (self.r, self.n_vertices, self.edges) == (other.r, other.n_vertices, other.edges)

    def __repr__(self) -> str:
        return f"MultiHypergraph(r={self.r}, N={self.n_vertices}, m={self.m})"


@dataclass(frozen=True)
class HyperMatching:
    edge_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edge_ids)

    def span(self, hg: MultiHypergraph) -> tuple[int, ...]:
        return tuple(sorted(v for i in self.edge_ids for v in hg.edges[i]))

    def is_valid_in(self, hg: MultiHypergraph) -> bool:
        if any(not 0 <= i < hg.m for i in self.edge_ids):
            return False
        verts = [v for i in self.edge_ids for v in hg.edges[i]]
        return len(verts) == len(set(verts)) and len(set(self.edge_ids)) == len(self.edge_ids)


@dataclass(frozen=True)
class Sunflower:
    petals: tuple[frozenset, ...]
    core: frozenset

    def is_valid(self) -> bool:
        ps = self.petals
        return len(set(ps)) == len(ps) and all(
            ps[i] & ps[j] == self.core for i in range(len(ps)) for j in range(i + 1, len(ps)))


def enumerate_matchings(hg: MultiHypergraph, t: int, cap: int | None = None) -> list[HyperMatching]:
    """Size-``t`` matchings by DFS over increasing edge ids; stops after ``cap``."""
    if t < 1:
        raise PreconditionError("t must be positive")
    cap = DEFAULT.matching_cap if cap is None else cap
    if cap < 1:
        raise PreconditionError("cap must be positive")
    edges = hg.edges
    out: list[HyperMatching] = []
    used = [False] * hg.n_vertices
    chosen: list[int] = []

    def dfs(start: int) -> bool:
        if len(chosen) == t:
            out.append(HyperMatching(tuple(chosen)))
            return len(out) >= cap
        # not enough edges left to finish
        for i in range(start, hg.m - (t - len(chosen)) + 1):
            e = edges[i]
            if any(used[v] for v in e):
                continue
            for v in e:
                used[v] = True
            chosen.append(i)
            stop = dfs(i + 1)
            chosen.pop()
            for v in e:
                used[v] = False
            if stop:
                return True
        return False

    dfs(0)
    return out


def matching_count_bound(hg: MultiHypergraph, t: int, mu) -> tuple[Fraction, bool]:
    """Lower bound ``(e/2t)^t`` on size-``t`` matchings and whether ``t <= N/(2 r^2 mu) + 1``.

    Requires ``Delta <= mu * d``. ``mu`` may be a float; it is converted exactly.
    """
    if t < 1:
        raise PreconditionError("t must be positive")
    mu = Fraction(mu)
    if hg.n_vertices and hg.m and hg.max_degree > mu * hg.average_degree:
        raise PreconditionError("maximum degree exceeds mu times the average degree")
    bound = Fraction(hg.m, 2 * t) ** t
    flag = t <= Fraction(hg.n_vertices, 2 * hg.r ** 2) / mu + 1 if mu > 0 else False
    return bound, bool(flag)


def rao_threshold(t: int, r: int, alpha) -> float:
    """``(alpha r log(tr))^t``; families larger than this contain an r-sunflower."""
    if t < 1 or r < 1:
        raise PreconditionError("need t, r >= 1")
    return (float(alpha) * r * math.log2(t * r)) ** t


def find_sunflower(family: Sequence[Iterable], r: int, budget: int | None = None) -> Sunflower | None:
    """Exact r-sunflower search; ``None`` means none exists.

    Every core is the intersection of two petals, so only pairwise
    intersections are tried (most frequent first). For a core ``X`` the task
    is ``r`` sets containing ``X`` whose remainders are pairwise disjoint,
    which is solved by backtracking. Raises :class:`SearchBudgetExceeded`
    after ``budget`` search nodes.
    """
    if r < 2:
        raise PreconditionError("r must be at least 2")
    budget = DEFAULT.search_budget if budget is None else budget
    sets = sorted({frozenset(s) for s in family}, key=lambda s: sorted(s))
    if len({len(s) for s in sets}) > 1:
        raise PreconditionError("all sets must have the same size")
    if len(sets) < r:
        return None
    freq: Counter = Counter()
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            freq[sets[i] & sets[j]] += 1
    cores = sorted(freq, key=lambda x: (-freq[x], len(x), sorted(x)))
    nodes = 0

    for core in cores:
        if freq[core] < r * (r - 1) // 2:
            continue
        petals = [s - core for s in sets if core <= s]
        if len(petals) < r:
            continue
        chosen: list[frozenset] = []

        def extend(start: int, covered: frozenset) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded("sunflower search exhausted its budget", nodes)
            if len(chosen) == r:
                return True
            for k in range(start, len(petals) - (r - len(chosen)) + 1):
                p = petals[k]
                if p & covered:
                    continue
                chosen.append(p)
                if extend(k + 1, covered | p):
                    return True
                chosen.pop()
            return False

        if extend(0, frozenset()):
            return Sunflower(tuple(p | core for p in chosen), core)
    return None


def is_regular_hypergraph(hg: MultiHypergraph, r: int) -> bool:
    """Nonempty and every vertex has degree ``r`` or ``0``."""
    deg = hg.degrees
    return hg.m > 0 and bool(np.isin(deg, (0, r)).all()) and bool((deg == r).any())


def regular_subhypergraph(hg: MultiHypergraph, r: int, cfg: ConstantsConfig = DEFAULT,
                          rng: np.random.Generator | None = None,
                          trace: list | None = None) -> MultiHypergraph | None:
    """r-regular sub-multi-hypergraph, or ``None`` if the search finds none.

    The target degree ``r`` may differ from the uniformity ``k``. Matching
    size starts at ``t = ceil(N / (2 k^2 mu))`` with ``mu = d^(1/(2k))``
    and then widens to the other feasible sizes. Size-t matchings are
    grouped by the vertex set they span, largest group first, and each group
    is searched for an r-sunflower of edge-id sets. Identical multi-edges
    have distinct ids, so ``r`` copies of one edge already form a sunflower
    with empty core. Raises :class:`SearchBudgetExceeded` only if
    nothing was found and some search was cut short.
    """
    if r < 2:
        raise PreconditionError("r must be at least 2")
    if hg.m == 0:
        return None
    if is_regular_hypergraph(hg, r):
        return hg
    k = hg.r
    d = float(hg.average_degree)
    mu = d ** (1 / (2 * k))
    t_max = hg.n_vertices // k
    t0 = min(max(1, math.ceil(hg.n_vertices / (2 * k * k * mu))), t_max)
    order = list(range(t0, t_max + 1)) + list(range(t0 - 1, 0, -1))
    cut_short = False
    for t in order:
        matchings = enumerate_matchings(hg, t, cfg.matching_cap)
        if len(matchings) >= cfg.matching_cap:
            cut_short = True
        groups: dict[tuple[int, ...], list[frozenset]] = defaultdict(list)
        for mt in matchings:
            groups[mt.span(hg)].append(frozenset(mt.edge_ids))
        ranked = sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0]))
        for span, family in ranked:
            if len(family) < r:
                break
            try:
                flower = find_sunflower(family, r, cfg.search_budget)
            except SearchBudgetExceeded:
                cut_short = True
                continue
            if flower is None:
                continue
            keep = set().union(*flower.petals) - flower.core
            sub = hg.sub(keep)
            if not is_regular_hypergraph(sub, r):
                raise ConsistencyError("sunflower of spanning matchings is not r-regular")
            if trace is not None:
                trace.append({"stage": "regular_subhypergraph", "t": t, "t0": t0,
                              "matchings": len(matchings), "group": len(family),
                              "core": len(flower.core), "edges": sub.m})
            return sub
    if cut_short:
        raise SearchBudgetExceeded("regular sub-hypergraph search was incomplete")
    return None


def bipartite_to_hyper(h: BipartiteGraph, r: int) -> MultiHypergraph:
    """Hypergraph on part A with one edge ``N(v)`` per B-vertex ``v`` (all of degree r)."""
    a = h.part_a.tolist()
    b = h.part_b.tolist()
    if any(h.graph.degree(v) != r for v in b):
        raise PreconditionError(f"every B-vertex must have degree exactly {r}")
    pos = {v: i for i, v in enumerate(a)}
    edges = [[pos[u] for u in h.neighbors(v)] for v in b]
    return MultiHypergraph(r, len(a), edges, vertex_labels=a, edge_labels=b)


def hyper_to_bipartite_regular(sub: MultiHypergraph, origin: BipartiteGraph,
                               edge_origin: Sequence[int] | None = None) -> BipartiteGraph:
    """Subgraph of ``origin`` induced by the non-isolated vertices of ``sub`` and their B-vertices."""
    b_ids = list(sub.edge_labels if edge_origin is None else edge_origin)
    if len(b_ids) != sub.m:
        raise PreconditionError("edge provenance has the wrong length")
    a_ids = [sub.vertex_labels[v] for v in range(sub.n_vertices)]
    for e, b in zip(sub.edges, b_ids):
        if not 0 <= b < origin.n or origin.side[b] != 1:
            raise PreconditionError(f"edge origin {b} is not a B-vertex")
        if sorted(a_ids[v] for v in e) != sorted(origin.neighbors(b)):
            raise PreconditionError(f"edge {e} does not match the neighborhood of {b}")
    deg = sub.degrees
    verts = [a_ids[v] for v in np.flatnonzero(deg > 0).tolist()] + b_ids
    out = origin.restrict(verts)
    if not (out.n and (out.degrees == sub.r).all()):
        raise ConsistencyError("reconstructed bipartite graph is not regular")
    return out
