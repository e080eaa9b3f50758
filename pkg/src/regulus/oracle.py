"""Ground truth: regularity certification, exact search and AFK predicates.

Deciding whether a graph has an r-regular subgraph is NP-hard already for
r = 3, so the exact search is budgeted and reports one of three verdicts.
``INDETERMINATE`` must never be read as "none exists".
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_flow

from .errors import PreconditionError, SearchBudgetExceeded
from .graph import BipartiteGraph, Graph, min_degree_peel, two_coloring

__all__ = [
    "FOUND",
    "NONE",
    "INDETERMINATE",
    "SearchBudget",
    "SearchResult",
    "AFKVerdict",
    "is_r_regular",
    "regular_factor_peel",
    "find_regular_subgraph_exact",
    "max_regular_degree",
    "afk_condition",
    "choose_q",
    "is_prime_power",
]

FOUND = "found"
NONE = "none"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 200_000
    time_hint: float | None = None

    def __post_init__(self):
        if self.node_limit <= 0 or (self.time_hint is not None and self.time_hint <= 0):
            raise PreconditionError("budget must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: str
    graph: Graph | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


def is_r_regular(g: Graph | BipartiteGraph, r: int) -> bool:
    """Nonempty, at least one edge, and every vertex has degree exactly ``r``."""
    if isinstance(g, BipartiteGraph):
        g = g.graph
    return g.n > 0 and g.m > 0 and bool((g.degrees == r).all())


def regular_factor_peel(h: BipartiteGraph, s: int) -> BipartiteGraph | None:
    """Heuristic s-regular subgraph of a bipartite graph via repeated max-flow.

    Each round solves the degree-constrained subgraph problem (every vertex
    degree <= s, maximum edges) as a flow, then drops the vertices with the
    smallest load among those that could not reach degree s. Stops when all
    remaining vertices are saturated (an s-regular subgraph) or nothing is
    left. Sound but not complete.
    """
    if s < 1:
        raise PreconditionError("s must be positive")
    cur = min_degree_peel(h, s)
    while cur.n:
        a = cur.part_a
        b = cur.part_b
        n = cur.n
        src, snk = n, n + 1
        ea = cur.graph.edges
        # orient every edge A -> B
        tail = np.where(cur.side[ea[:, 0]] == 0, ea[:, 0], ea[:, 1])
        head = np.where(cur.side[ea[:, 0]] == 0, ea[:, 1], ea[:, 0])
        rows = np.concatenate([np.full(len(a), src), tail, b])
        cols = np.concatenate([a, head, np.full(len(b), snk)])
        caps = np.concatenate([np.full(len(a), s), np.ones(len(tail)), np.full(len(b), s)])
        net = csr_matrix((caps.astype(np.int32), (rows, cols)), shape=(n + 2, n + 2))
        res = maximum_flow(net, src, snk)
        flow = res.flow
        used = np.asarray(flow[tail, head]).ravel() > 0
        load = np.bincount(ea[used].ravel(), minlength=n)
        short = load < s
        if not short.any():
            out = cur.edge_subgraph(used)
            return out if out.m else None
        # drop only the worst-served vertices; the rest may fit a different flow
        worst = short & (load == load[short].min())
        cur = min_degree_peel(cur.restrict(np.flatnonzero(~worst)), s)
    return None


class _Search:
    """Edge-branching backtracking with degree-window propagation."""

    def __init__(self, g: Graph, r: int, limit: int):
        self.g = g
        self.r = r
        self.limit = limit
        self.nodes = 0
        self.ends = g.edge_list()
        self.inc: list[list[int]] = [[] for _ in range(g.n)]
        for i, (u, v) in enumerate(self.ends):
            self.inc[u].append(i)
            self.inc[v].append(i)
        self.status = [0] * g.m
        self.c = [0] * g.n
        self.avail = [len(x) for x in self.inc]
        self.trail: list[int] = []
        self.included = 0

    def _set(self, e: int, val: int) -> None:
        self.status[e] = val
        self.trail.append(e)
        u, v = self.ends[e]
        self.avail[u] -= 1
        self.avail[v] -= 1
        if val == 1:
            self.c[u] += 1
            self.c[v] += 1
            self.included += 1

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            e = self.trail.pop()
            u, v = self.ends[e]
            self.avail[u] += 1
            self.avail[v] += 1
            if self.status[e] == 1:
                self.c[u] -= 1
                self.c[v] -= 1
                self.included -= 1
            self.status[e] = 0

    def _propagate(self, queue: list[int]) -> bool:
        r, c, avail, status = self.r, self.c, self.avail, self.status
        while queue:
            v = queue.pop()
            if c[v] > r:
                return False
            close = c[v] == r
            if c[v] + avail[v] < r:
                if c[v] > 0:
                    return False
                close = True
            if close and avail[v]:
                for e in self.inc[v]:
                    if status[e] == 0:
                        self._set(e, -1)
                        a, b = self.ends[e]
                        queue.append(b if a == v else a)
        return True

    def run(self) -> list[int] | None:
        if not self._propagate(list(range(self.g.n))):
            return None
        return self._search()

    def _search(self) -> list[int] | None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise SearchBudgetExceeded("exact regular-subgraph search exhausted", self.nodes)
        r, c, avail = self.r, self.c, self.avail
        pivot = -1
        best = None
        for v in range(self.g.n):
            if 0 < c[v] < r:
                slack = c[v] + avail[v] - r
                if best is None or slack < best:
                    best, pivot = slack, v
        if pivot >= 0:
            e = next(e for e in self.inc[pivot] if self.status[e] == 0)
        elif self.included:
            return [i for i, s in enumerate(self.status) if s == 1]
        else:
            e = next((i for i, s in enumerate(self.status) if s == 0), -1)
            if e < 0:
                return None
        u, v = self.ends[e]
        for val in (1, -1):
            mark = len(self.trail)
            self._set(e, val)
            if self._propagate([u, v]):
                sol = self._search()
                if sol is not None:
                    return sol
            self._undo(mark)
        return None


def find_regular_subgraph_exact(g: Graph | BipartiteGraph, r: int,
                                budget: SearchBudget | int | None = None) -> SearchResult:
    """Exact search for an r-regular subgraph; verdict FOUND, NONE or INDETERMINATE.

    Only the r-core can host the subgraph; each of its components is searched
    separately. Bipartite components first try the flow heuristic.
    """
    if r < 1:
        raise PreconditionError("r must be positive")
    if budget is None:
        budget = SearchBudget()
    elif isinstance(budget, int):
        budget = SearchBudget(budget)
    host = g.graph if isinstance(g, BipartiteGraph) else g
    core = min_degree_peel(host, r)
    if core.m == 0:
        return SearchResult(NONE)
    ncomp, comp = connected_components(
        csr_matrix((np.ones(core.m), (core.edges[:, 0], core.edges[:, 1])), shape=(core.n, core.n)),
        directed=False)
    nodes = 0
    blocked = False
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * core.m + 1000))
    try:
        for k in range(ncomp):
            part = core.restrict(np.flatnonzero(comp == k))
            if part.m == 0:
                continue
            if is_r_regular(part, r):
                return SearchResult(FOUND, part, nodes)
            try:
                bip = two_coloring(part)
            except PreconditionError:
                bip = None
            if bip is not None:
                hit = regular_factor_peel(bip, r)
                if hit is not None:
                    return SearchResult(FOUND, hit.graph, nodes)
            search = _Search(part, r, max(budget.node_limit - nodes, 1))
            try:
                sol = search.run()
            except SearchBudgetExceeded:
                nodes += search.nodes
                blocked = True
                break
            nodes += search.nodes
            if sol is not None:
                mask = np.zeros(part.m, dtype=bool)
                mask[sol] = True
                return SearchResult(FOUND, part.edge_subgraph(mask), nodes)
    finally:
        sys.setrecursionlimit(old_limit)
    return SearchResult(INDETERMINATE if blocked else NONE, None, nodes)


def max_regular_degree(g: Graph | BipartiteGraph, budget: SearchBudget | int | None = None) -> int:
    """Largest r such that ``g`` has an r-regular subgraph (0 if edgeless).

    Raises SearchBudgetExceeded if a larger candidate could not be settled.
    """
    host = g.graph if isinstance(g, BipartiteGraph) else g
    if host.m == 0:
        return 0
    r = host.max_degree
    while r > 1 and min_degree_peel(host, r).m == 0:
        r -= 1
    for cand in range(r, 0, -1):
        res = find_regular_subgraph_exact(host, cand, budget)
        if res.status == FOUND:
            return cand
        if res.status == INDETERMINATE:
            raise SearchBudgetExceeded(f"could not settle r={cand}", res.nodes)
    raise AssertionError("a graph with an edge always has a 1-regular subgraph")


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next((d for d in range(2, math.isqrt(q) + 1) if q % d == 0), q)
    while q % p == 0:
        q //= p
    return q == 1


@dataclass(frozen=True)
class AFKVerdict:
    holds: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def afk_condition(q: int, r: int, d, delta) -> AFKVerdict:
    """Hypothesis of the Alon-Friedland-Kalai theorem for an r-regular subgraph.

    ``q`` a prime power with ``q >= r`` and ``q = r (mod 2)``; maximum degree
    ``delta >= 2q - 2``; average degree ``d > (2q-2)/(2q-1) * (delta + 1)``.
    """
    if not is_prime_power(q):
        return AFKVerdict(False, f"q={q} is not a prime power")
    if q < r:
        return AFKVerdict(False, f"q={q} < r={r}")
    if (q - r) % 2:
        return AFKVerdict(False, f"parity mismatch: q={q}, r={r}")
    d, delta = Fraction(d), Fraction(delta)
    if delta < 2 * q - 2:
        return AFKVerdict(False, f"max degree {delta} < 2q-2 = {2 * q - 2}")
    bound = Fraction(2 * q - 2, 2 * q - 1) * (delta + 1)
    if not d > bound:
        return AFKVerdict(False, f"average degree {d} <= {bound}")
    return AFKVerdict(True, "")


def choose_q(d, lam) -> int:
    """Power of two ``q`` with ``d / (10 lam) <= q < d / (5 lam)``."""
    d, lam = Fraction(d), Fraction(lam)
    if lam <= 0:
        raise PreconditionError("lambda must be positive")
    low = d / (10 * lam)
    if low < 1:
        raise PreconditionError(f"d/(10*lambda) = {float(low):.3g} < 1")
    q = 1
    while q < low:
        q *= 2
    assert low <= q < 2 * low
    return q
