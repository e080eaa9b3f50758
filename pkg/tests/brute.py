"""Independent brute-force references. Deliberately naive; share no code with the package."""

from __future__ import annotations

import itertools
import math
from collections import Counter

import mpmath


def edge_set(edges) -> list[tuple[int, int]]:
    return sorted({(min(int(u), int(v)), max(int(u), int(v))) for u, v in edges})


def degrees(n: int, edges) -> list[int]:
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def has_r_regular_subgraph(n: int, edges, r: int) -> bool:
    """Enumerate every nonempty edge subset (use only for small edge counts)."""
    edges = edge_set(edges)
    for k in range(1, len(edges) + 1):
        if 2 * k % r:
            continue
        for sub in itertools.combinations(edges, k):
            deg = Counter()
            for u, v in sub:
                deg[u] += 1
                deg[v] += 1
            if all(x == r for x in deg.values()):
                return True
    return False


def has_r_regular_by_vertex_sets(n: int, edges, r: int) -> bool:
    """Second enumeration order: vertex subsets, then r-factor of the induced graph."""
    adj = {v: set() for v in range(n)}
    for u, v in edge_set(edges):
        adj[u].add(v)
        adj[v].add(u)
    for size in range(r + 1, n + 1):
        for verts in itertools.combinations(range(n), size):
            vs = set(verts)
            inner = [(u, v) for u in verts for v in adj[u] if v in vs and u < v]
            if all(len(adj[u] & vs) >= r for u in verts) and _has_factor(verts, inner, r):
                return True
    return False


def _has_factor(verts, edges, r) -> bool:
    need = {v: r for v in verts}

    def rec(i: int) -> bool:
        if all(x == 0 for x in need.values()):
            return True
        if i == len(edges):
            return False
        u, v = edges[i]
        # every vertex must still be completable by the remaining edges
        if need[u] > 0 and need[v] > 0:
            need[u] -= 1
            need[v] -= 1
            if rec(i + 1):
                return True
            need[u] += 1
            need[v] += 1
        return rec(i + 1)

    return rec(0)


def max_regular_degree(n: int, edges) -> int:
    edges = edge_set(edges)
    if not edges:
        return 0
    best = 1
    for r in range(2, max(degrees(n, edges)) + 1):
        if has_r_regular_subgraph(n, edges, r):
            best = r
    return best


def max_matching_size(edges) -> int:
    edges = edge_set(edges)
    best = 0
    for k in range(1, len(edges) + 1):
        if any(len({x for e in sub for x in e}) == 2 * k
               for sub in itertools.combinations(edges, k)):
            best = k
        else:
            break
    return best


def best_cut(n: int, edges) -> int:
    edges = edge_set(edges)
    best = 0
    for mask in range(1 << max(n - 1, 0)):
        side = [(mask >> v) & 1 for v in range(n)]
        best = max(best, sum(side[u] != side[v] for u, v in edges))
    return best


def count_matchings(hedges, t: int) -> int:
    """Number of t-subsets of edge ids with pairwise disjoint edges."""
    count = 0
    for ids in itertools.combinations(range(len(hedges)), t):
        verts = [v for i in ids for v in hedges[i]]
        if len(verts) == len(set(verts)):
            count += 1
    return count


def has_sunflower(family, r: int) -> bool:
    sets = list({frozenset(s) for s in family})
    for combo in itertools.combinations(sets, r):
        core = frozenset.intersection(*combo)
        if all(a & b == core for a, b in itertools.combinations(combo, 2)):
            return True
    return False


def densest_at_most(n: int, edges, m: int, allowed=None) -> int:
    """max e(G[S]) over |S| <= m by full enumeration."""
    verts = list(range(n)) if allowed is None else sorted(allowed)
    es = edge_set(edges)
    k = min(m, len(verts))
    best = 0
    for sub in itertools.combinations(verts, k):
        s = set(sub)
        best = max(best, sum(u in s and v in s for u, v in es))
    return best


def peel(n: int, edges, threshold) -> set[int]:
    alive = set(range(n))
    es = edge_set(edges)
    changed = True
    while changed:
        changed = False
        deg = Counter()
        for u, v in es:
            if u in alive and v in alive:
                deg[u] += 1
                deg[v] += 1
        for v in list(alive):
            if deg[v] < threshold:
                alive.discard(v)
                changed = True
    return alive


def rao_threshold_exact(t: int, r: int, alpha) -> "mpmath.mpf":
    mpmath.mp.dps = 50
    return (mpmath.mpf(alpha) * r * mpmath.log(t * r, 2)) ** t


def dyadic_scan(deg_by_vertex: dict[int, int], ts) -> list[set[int]]:
    classes = [set() for _ in ts]
    for v, d in deg_by_vertex.items():
        if d <= 2 ** ts[0]:
            classes[0].add(v)
            continue
        placed = False
        for i in range(1, len(ts)):
            if 2 ** ts[i - 1] < d <= 2 ** ts[i]:
                classes[i].add(v)
                placed = True
                break
        if not placed:
            classes[-1].add(v)
    return classes


def hall_tight_minimal(a_side, nbrs) -> list[frozenset]:
    """All inclusion-minimal nonempty S with |N(S)| <= |S|."""
    tight = []
    for k in range(1, len(a_side) + 1):
        for s in itertools.combinations(a_side, k):
            fs = frozenset(s)
            if any(t < fs for t in tight):
                continue
            if len(set().union(*(nbrs[v] for v in s))) <= k:
                tight.append(fs)
    return tight


def binom_pmf(n: int, p: float, k: int) -> float:
    return math.comb(n, k) * p ** k * (1 - p) ** (n - k)
