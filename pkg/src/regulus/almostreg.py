"""Almost-regular subgraphs through chains of Hall-tight sets.

Inside a bipartite graph with minimum degree ``d`` and ``|A| >= |B|`` one
repeatedly takes an inclusion-minimal tight set ``A_{i+1}`` of the residual
graph ``G_i``, matches it perfectly onto its neighborhood and removes that
matching. Any ``s + 1`` consecutive matchings over a window where ``|A_j|``
at most halves form a subgraph of maximum degree ``s + 1`` and average
degree at least ``(s + 1)/2``; peeling at ``(s + 1)/4`` makes it
4-almost-regular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .config import DEFAULT, ConstantsConfig
from .errors import ConsistencyError, PreconditionError, RouteFailure
from .graph import BipartiteGraph, Graph, bipartite_half, min_degree_peel
from .matching import minimal_tight_set, perfect_matching_on
from .nearreg import regular_in_almost_regular

__all__ = [
    "PyberChain",
    "pyber_chain",
    "window_parameters",
    "almost_regular_subgraph",
    "prop_bound",
    "regular_by_regularization",
]


@dataclass(frozen=True)
class PyberChain:
    """Nested tight sets ``A_1 ⊇ A_2 ⊇ ...`` with matchings ``M_1, M_2, ...``.

    ``a_sets[i]``, ``b_sets[i]`` and ``matchings[i]`` hold stage ``i + 1`` in
    vertex ids of ``host``; matchings are ``(a, b)`` pairs.
    """

    host: BipartiteGraph
    d: int
    a_sets: tuple[tuple[int, ...], ...]
    b_sets: tuple[tuple[int, ...], ...]
    matchings: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def depth(self) -> int:
        return len(self.a_sets)

    def sizes(self) -> list[int]:
        return [len(a) for a in self.a_sets]

    def residual(self, i: int) -> BipartiteGraph:
        """``G_i = host[A_i, B_i] - M_1 - ... - M_i`` (stage numbers start at 1)."""
        if not 1 <= i <= self.depth:
            raise IndexError(i)
        g = self.host.graph
        removed = g.edges_from_pairs([e for m in self.matchings[:i] for e in m])
        return self.host.restrict(self.a_sets[i - 1] + self.b_sets[i - 1], ~removed)

    def verify(self) -> None:
        """Raise :class:`ConsistencyError` on the first violated chain invariant."""
        g = self.host.graph
        seen: set[tuple[int, int]] = set()
        for i in range(self.depth):
            a, b, m = set(self.a_sets[i]), set(self.b_sets[i]), self.matchings[i]
            if len(a) != len(b) or not a:
                raise ConsistencyError(f"stage {i + 1}: |A_i| != |B_i|")
            if i and not (a <= set(self.a_sets[i - 1]) and b <= set(self.b_sets[i - 1])):
                raise ConsistencyError(f"stage {i + 1}: sets not nested")
            if {x for x, _ in m} != a or {y for _, y in m} != b or len(m) != len(a):
                raise ConsistencyError(f"stage {i + 1}: M_i is not perfect between A_i and B_i")
            for x, y in m:
                key = (min(x, y), max(x, y))
                if not g.has_edge(x, y) or key in seen:
                    raise ConsistencyError(f"stage {i + 1}: matching edge reused or missing")
                seen.add(key)
            res = self.residual(i + 1)
            if (res.degrees[res.side == 0] < self.d - (i + 1)).any():
                raise ConsistencyError(f"stage {i + 1}: residual degree below d - i")


def pyber_chain(h: BipartiteGraph, d: int, depth: int | None = None) -> PyberChain:
    """Chain of minimal tight sets and perfect matchings.

    Requires minimum degree at least ``d >= 1``; the sides are swapped when
    ``|A| < |B|``. ``depth`` defaults to ``max(1, d // 2)`` and may not
    exceed ``d``.
    """
    if d < 1:
        raise PreconditionError("need d >= 1")
    if h.n == 0 or h.graph.min_degree < d:
        raise PreconditionError(f"minimum degree must be at least d={d}")
    if len(h.part_a) < len(h.part_b):
        h = h.swapped()
    depth = max(1, d // 2) if depth is None else depth
    if not 1 <= depth <= d:
        raise PreconditionError("need 1 <= depth <= d")
    # local copy whose labels are host ids
    cur = BipartiteGraph(h.graph.relabeled_as_root(), h.side)
    a_sets, b_sets, matchings = [], [], []
    for _ in range(depth):
        tight = minimal_tight_set(cur, "A")
        match = perfect_matching_on(cur, tight)
        lab = cur.graph.labels
        a_sets.append(tuple(int(lab[v]) for v in tight.members))
        b_sets.append(tuple(int(lab[v]) for v in tight.neighborhood))
        matchings.append(tuple((int(lab[a]), int(lab[b])) for a, b in match))
        keep = np.concatenate([tight.members, tight.neighborhood]).astype(np.int64)
        sub = cur.restrict(keep)
        # same vertex order, so map matching endpoints through restrict's renumbering
        pos = {int(v): i for i, v in enumerate(sub.graph.origin)}
        cur = sub.restrict(None, ~sub.graph.edges_from_pairs(
            [(pos[a], pos[b]) for a, b in match]))
    return PyberChain(h, d, tuple(a_sets), tuple(b_sets), tuple(matchings))


def window_parameters(n: int, d: int) -> dict[str, Any]:
    """``t = floor(d/2)``, ``k = floor(log(8n/d)) - 1`` and ``s = floor(t / log(8n/d))``."""
    if d < 1 or n < d:
        raise PreconditionError("need 1 <= d <= n")
    lg = math.log2(8 * n / d)
    t = d // 2
    return {"t": t, "k": math.floor(lg) - 1, "s": math.floor(t / lg), "log": lg}


def prop_bound(n: int, d) -> float:
    """Average-degree guarantee ``d / (100 log(32 n / d))``."""
    d = float(d)
    return d / (100 * math.log2(32 * n / d))


def _window(sizes: list[int], s: int) -> int | None:
    """First 1-based ``j`` with ``|A_{j+s}| >= |A_j| / 2``."""
    for j in range(1, len(sizes) - s + 1):
        if 2 * sizes[j + s - 1] >= sizes[j - 1]:
            return j
    return None


def almost_regular_subgraph(g: Graph, widest: bool = False, trace: list | None = None) -> Graph:
    """4-almost-regular subgraph with average degree at least ``d / (100 log(32n/d))``.

    bipartite half -> minimum degree ``d/4`` -> tight-set chain -> union of
    the matchings of a halving window -> peel at ``(s+1)/4``. With
    ``widest=True`` the window length is the largest admissible one rather
    than the minimal guaranteed ``s``, which only increases the degree.
    """
    if g.m == 0:
        raise PreconditionError("almost_regular_subgraph needs at least one edge")
    d = g.average_degree
    half = bipartite_half(g)
    core = min_degree_peel(half, d / 4)
    if core.m == 0:
        raise ConsistencyError("min-degree d/4 subgraph of the bipartite half is empty")
    d_int = core.graph.min_degree
    params = window_parameters(core.n, d_int)
    s = params["s"]
    record: dict[str, Any] = {"stage": "almost_regular", "n": g.n, "d": float(d),
                              "d_core": d_int, "core_size": core.n, **params}
    if s == 0 and not (widest and d_int >= 2):
        e = core.graph.edges[0]
        out = core.graph.restrict(e.tolist())
        if trace is not None:
            trace.append({**record, "window": None, "size": out.n})
        return out
    chain = pyber_chain(core, d_int, max(1, params["t"]))
    sizes = chain.sizes()
    width = s
    j = _window(sizes, s)
    if j is None:
        raise ConsistencyError(f"no halving window of length {s} in chain sizes {sizes}")
    if widest:
        for w in range(len(sizes) - 1, s, -1):
            jw = _window(sizes, w)
            if jw is not None:
                width, j = w, jw
                break
    pairs = [e for m in chain.matchings[j - 1:j + width] for e in m]
    host = chain.host
    mask = host.graph.edges_from_pairs(pairs)
    h = host.restrict(chain.a_sets[j - 1] + chain.b_sets[j - 1], mask)
    out = min_degree_peel(h, Fraction(width + 1, 4))
    if out.m == 0 or out.graph.max_degree > 4 * out.graph.min_degree:
        raise ConsistencyError("window subgraph failed the 4-almost-regular check")
    if trace is not None:
        trace.append({**record, "window": [j, width], "chain_sizes": sizes, "size": out.n,
                      "avg": float(out.graph.average_degree)})
    return out.graph


def regular_by_regularization(g: Graph, r: int, cfg: ConstantsConfig = DEFAULT,
                              rng: np.random.Generator | None = None,
                              trace: list | None = None) -> Graph:
    """r-regular subgraph via an almost-regular subgraph and near-regularization."""
    if r < 1:
        raise PreconditionError("r must be positive")
    if g.m == 0:
        raise RouteFailure("graph has no edges", {"r": r})
    rng = np.random.default_rng() if rng is None else rng
    local: list = [] if trace is None else trace
    almost = almost_regular_subgraph(g, widest=True, trace=local)
    try:
        return regular_in_almost_regular(almost, r, cfg, rng, local)
    except RouteFailure as exc:
        details = {**exc.details, "almost_regular_avg": float(almost.average_degree),
                   "almost_regular_size": almost.n}
        raise RouteFailure(str(exc), details) from exc
