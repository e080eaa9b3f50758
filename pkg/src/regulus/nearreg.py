"""Near-regularization of almost-regular graphs.

A graph whose corrected degrees ``d(v) + f(v)`` lie in ``[d, Delta]`` is
shrunk by a randomized step that deletes low vertices and edges at high
vertices at slightly different rates, so the window contracts. The
deterministic :func:`build_schedule` fixes the windows in advance; iterating
:func:`one_step` along it ends with maximum degree within ``slack`` of the
average. :func:`regular_in_almost_regular` turns that into an r-regular
subgraph.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .config import DEFAULT, ConstantsConfig
from .errors import LasVegasFailure, PreconditionError, RouteFailure
from .graph import BipartiteGraph, Graph, bipartite_half, min_degree_peel
from .matching import regular_bipartite_peel
from .oracle import SearchBudget, find_regular_subgraph_exact, regular_factor_peel

log = logging.getLogger(__name__)

__all__ = [
    "Stage",
    "Schedule",
    "CorrectedGraph",
    "Thinning",
    "build_schedule",
    "random_thinning",
    "one_step",
    "maximal_matching",
    "near_regularize",
    "extract_regular",
    "regular_in_almost_regular",
]

EPS_CAP = Fraction(1, 100)
# eps_i is rounded down onto this dyadic grid; exact maximality would make the
# numerators of d_i, Delta_i double in length at every stage.
EPS_GRID_BITS = 48


@dataclass(frozen=True)
class Stage:
    eps: Fraction
    d: Fraction
    delta: Fraction


@dataclass(frozen=True)
class Schedule:
    """Windows ``[d_i, Delta_i]`` with step sizes ``eps_i`` for ``i < k``."""

    stages: tuple[Stage, ...]
    final_d: Fraction
    final_delta: Fraction
    slack: Fraction

    @property
    def k(self) -> int:
        return len(self.stages)

    def window(self, i: int) -> tuple[Fraction, Fraction]:
        if i == self.k:
            return self.final_d, self.final_delta
        return self.stages[i].d, self.stages[i].delta


def build_schedule(d, delta0, slack) -> Schedule:
    """Deterministic window schedule.

    While ``Delta_i > d_i + slack``: take ``eps_i`` maximal with
    ``eps_i <= 1/100`` and ``Delta_i >= (1 + 10 eps_i) d_i`` (up to the dyadic
    grid), then ``d_{i+1} = (1 - 5/4 eps_i) d_i`` and
    ``Delta_{i+1} = (1 - 7/4 eps_i) Delta_i``.
    """
    d, delta, slack = Fraction(d), Fraction(delta0), Fraction(slack)
    if not (d > 0 and delta >= d and slack > 0):
        raise PreconditionError("need delta0 >= d > 0 and slack > 0")
    scale = 1 << EPS_GRID_BITS
    stages = []
    while delta > d + slack:
        eps_max = (delta / d - 1) / 10
        if eps_max >= EPS_CAP:
            eps = EPS_CAP
        else:
            eps = Fraction(math.floor(eps_max * scale), scale)
            if eps <= 0:
                raise PreconditionError("window too narrow relative to d for the eps grid")
        stages.append(Stage(eps, d, delta))
        d = (1 - Fraction(5, 4) * eps) * d
        delta = (1 - Fraction(7, 4) * eps) * delta
    return Schedule(tuple(stages), d, delta, slack)


@dataclass(frozen=True)
class CorrectedGraph:
    graph: Graph
    correction: np.ndarray

    def __post_init__(self):
        corr = np.asarray(self.correction, dtype=np.int64)
        if corr.shape != (self.graph.n,):
            raise PreconditionError("correction must be defined on every vertex")
        if (corr < 0).any():
            raise PreconditionError("correction must be nonnegative")
        corr.setflags(write=False)
        object.__setattr__(self, "correction", corr)

    @classmethod
    def plain(cls, g: Graph) -> "CorrectedGraph":
        return cls(g, np.zeros(g.n, dtype=np.int64))

    @property
    def corrected_degrees(self) -> np.ndarray:
        return self.graph.degrees + self.correction


@dataclass(frozen=True)
class Thinning:
    """One random draw before repair: surviving graph, thinned correction, low-set flags."""

    graph: Graph
    correction: np.ndarray
    low: np.ndarray


def random_thinning(cg: CorrectedGraph, eps, d, delta, rng: np.random.Generator) -> Thinning:
    """Random deletions of the step, without the capping/repair phase.

    Vertices with corrected degree at most the window midpoint form the low
    set. Edges inside the high set die with probability ``2 eps - eps^2``,
    low-high edges with probability ``eps``, low vertices with probability
    ``eps``; corrections thin binomially at the matching survival rate.
    """
    g = cg.graph
    e = float(eps)
    corr = cg.corrected_degrees
    mid = math.floor((Fraction(d) + Fraction(delta)) / 2)
    high = corr > mid
    vdel = ~high & (rng.random(g.n) < e)
    edges = g.edges
    hu = high[edges[:, 0]]
    hv = high[edges[:, 1]]
    p = np.where(hu & hv, 2 * e - e * e, np.where(hu ^ hv, e, 0.0))
    edel = rng.random(g.m) < p
    alive = ~vdel
    keep = ~edel & alive[edges[:, 0]] & alive[edges[:, 1]]
    f = cg.correction
    thinned = np.where(high, rng.binomial(f, (1 - e) ** 2), rng.binomial(f, 1 - e))
    verts = np.flatnonzero(alive)
    sub = g.restrict(verts, keep)
    return Thinning(sub, thinned[verts], ~high[verts])


def _cap_degrees(g: Graph, cap: int) -> Graph:
    """Delete edges at vertices above ``cap``, each time dropping the edge to the
    currently highest-degree neighbor. Keeps the vertex set."""
    deg = g.degrees.copy()
    over = np.flatnonzero(deg > cap).tolist()
    if not over:
        return g
    adj: dict[int, set[int]] = {}

    def nbrs(v: int) -> set[int]:
        if v not in adj:
            adj[v] = set(g.adjacency[v])
        return adj[v]

    removed = []
    for v in over:
        nv = nbrs(v)
        while deg[v] > cap:
            u = max(nv, key=lambda w: (deg[w], -w))
            nv.discard(u)
            nbrs(u).discard(v)
            deg[v] -= 1
            deg[u] -= 1
            removed.append((v, u))
    return g.restrict(None, ~g.edges_from_pairs(removed))


def one_step(cg: CorrectedGraph, eps, d, delta, rng: np.random.Generator,
             retry_budget: int | None = None, cfg: ConstantsConfig = DEFAULT,
             stats: dict[str, Any] | None = None) -> CorrectedGraph:
    """One certified contraction of the corrected-degree window.

    Maps a graph with ``d <= d(v) + f(v) <= delta`` to a subgraph with at
    least ``(1 - 4 eps)|G|`` vertices and corrected degrees in
    ``[(1 - 5/4 eps) d, (1 - 7/4 eps) delta]``. Draws are retried until the
    output verifies; raises :class:`LasVegasFailure` after ``retry_budget``.
    """
    eps, d, delta = Fraction(eps), Fraction(d), Fraction(delta)
    budget = cfg.retry_budget if retry_budget is None else retry_budget
    if not 0 < eps <= EPS_CAP:
        raise PreconditionError("need 0 < eps <= 1/100")
    if delta < (1 + 10 * eps) * d:
        raise PreconditionError("need delta >= (1 + 10 eps) d")
    if eps * d < Fraction(cfg.floor):
        raise PreconditionError(f"eps*d = {float(eps * d):.4g} below floor {cfg.floor}")
    corr = cg.corrected_degrees
    if len(corr) and (corr.min() < d or corr.max() > delta):
        raise PreconditionError("corrected degrees outside [d, delta]")
    lower = math.ceil((1 - Fraction(5, 4) * eps) * d)
    upper = math.floor((1 - Fraction(7, 4) * eps) * delta)
    if lower > upper:
        raise PreconditionError("target window contains no integer")

    n = cg.graph.n
    ef = float(eps)
    min_size = (1 - 4 * eps) * n
    few_large = 4 * n * math.exp(-ef * float(delta) / 500)
    small_g = 4 * n * math.exp(-ef * float(d) / 100)
    growth = cfg.correction_tolerance * n * math.exp(-ef * float(d) / 1000)
    base_sum = int(cg.correction.sum())
    last: dict[str, Any] = {}
    for attempt in range(1, budget + 1):
        draw = random_thinning(cg, eps, d, delta, rng)
        gp = draw.graph
        deficit = np.maximum(0, lower - (gp.degrees + draw.correction))
        n_large = int((gp.degrees > upper).sum())
        last = {"attempt": attempt, "size": gp.n, "n_large": n_large,
                "deficit_sum": int(deficit.sum())}
        if gp.n < min_size or n_large > few_large or deficit.sum() > small_g:
            continue
        gpp = _cap_degrees(gp, upper)
        new_corr = np.maximum(0, lower - gpp.degrees)
        total = gpp.degrees + new_corr
        last["correction_sum"] = int(new_corr.sum())
        if new_corr.sum() > base_sum + growth:
            continue
        if gpp.n and (total.min() < lower or total.max() > upper):
            continue
        if stats is not None:
            stats["attempts"] = attempt
        return CorrectedGraph(gpp, new_corr)
    raise LasVegasFailure("one_step exhausted its retry budget", last)


def maximal_matching(g: Graph) -> Graph:
    """Greedy maximal matching in edge order, as a subgraph."""
    used = np.zeros(g.n, dtype=bool)
    mask = np.zeros(g.m, dtype=bool)
    for i, (u, v) in enumerate(g.edges.tolist()):
        if not used[u] and not used[v]:
            used[u] = used[v] = True
            mask[i] = True
    return g.edge_subgraph(mask)


def near_regularize(g: Graph, cfg: ConstantsConfig = DEFAULT,
                    rng: np.random.Generator | None = None,
                    trace: list | None = None) -> tuple[Graph, Fraction]:
    """Subgraph ``H`` with average degree ``d'`` and max degree at most ``d' + slack + 1``.

    ``d`` is the minimum degree of ``g`` and ``lambda = Delta(g)/d``. Below
    ``shortcut_factor * slack * lambda^3`` a maximal matching is returned
    with ``d' = 1``. Otherwise the window schedule is run from corrections
    ``f = 0``; a completed run is accepted only if
    ``d' >= c d / lambda^3 - 1``, the max-degree bound and
    ``|H| >= c |G| / lambda^10`` all hold.
    """
    rng = np.random.default_rng() if rng is None else rng
    if g.m == 0:
        raise PreconditionError("near_regularize needs at least one edge")
    d = g.min_degree
    if d == 0:
        raise PreconditionError("near_regularize needs minimum degree >= 1")
    lam = Fraction(g.max_degree, d)
    c = Fraction(cfg.c_scale)
    record = {"n": g.n, "m": g.m, "d": d, "lambda": float(lam)}
    if d < Fraction(cfg.shortcut_factor) * Fraction(cfg.slack) * lam ** 3:
        h = maximal_matching(g)
        if trace is not None:
            trace.append({**record, "stage": "near_regularize", "shortcut": True,
                          "d_prime": 1, "size": h.n})
        return h, Fraction(1)

    sched = build_schedule(d, g.max_degree, Fraction(cfg.slack))
    failures = []
    for attempt in range(1, cfg.retry_budget + 1):
        cg = CorrectedGraph.plain(g)
        try:
            for st in sched.stages:
                cg = one_step(cg, st.eps, st.d, st.delta, rng, cfg.retry_budget, cfg)
        except LasVegasFailure as exc:
            failures.append(exc.diagnostics)
            continue
        h = cg.graph
        if h.n == 0 or h.m == 0:
            failures.append({"reason": "empty"})
            continue
        avg = h.average_degree
        ok = (avg >= c * d / lam ** 3 - 1
              and h.max_degree <= avg + Fraction(cfg.slack) + 1
              and h.n >= c * g.n / lam ** 10)
        if not ok:
            failures.append({"avg": float(avg), "max": h.max_degree, "size": h.n,
                             "correction_sum": int(cg.correction.sum())})
            continue
        if trace is not None:
            trace.append({**record, "stage": "near_regularize", "shortcut": False, "k": sched.k,
                          "attempts": attempt, "d_prime": float(avg), "max": h.max_degree,
                          "size": h.n, "final_window": [float(sched.final_d),
                                                        float(sched.final_delta)]})
        return h, avg
    raise LasVegasFailure("near_regularize exhausted its retry budget",
                          {"failures": failures[-3:], "k": sched.k})


def extract_regular(h: BipartiteGraph, r: int, start: int | None = None,
                    budget: int | None = None) -> tuple[int, BipartiteGraph] | None:
    """Find an s-regular subgraph for some ``s >= r``.

    Tries flow extraction at ``s = start`` (default: floor of the average
    degree), then halves down towards ``r``, finishing with ``s = r``. If
    all of these fail and ``budget`` is given, runs the exact search for
    ``s = r`` with that node limit.
    """
    if h.m == 0:
        return None
    s = int(start if start is not None else math.floor(h.graph.average_degree))
    s = min(s, h.graph.max_degree)
    tried = set()
    while True:
        s = max(s, r)
        if s not in tried:
            tried.add(s)
            hit = regular_factor_peel(h, s)
            if hit is not None:
                return s, hit
        if s == r:
            break
        s //= 2
    if budget:
        res = find_regular_subgraph_exact(h, r, SearchBudget(budget))
        if res.found:
            return r, h.on(res.graph)
    return None


def regular_in_almost_regular(g: Graph, r: int, cfg: ConstantsConfig = DEFAULT,
                              rng: np.random.Generator | None = None,
                              trace: list | None = None) -> Graph:
    """r-regular subgraph of an almost-regular graph.

    bipartite half -> min degree d/4 -> near-regularize -> s-regular
    extraction -> peel perfect matchings down to r. When the near-regular
    graph yields nothing (typically the matching shortcut), extraction is
    retried on the min-degree subgraph before giving up.
    """
    rng = np.random.default_rng() if rng is None else rng
    if r < 1:
        raise PreconditionError("r must be positive")
    if g.m == 0:
        raise RouteFailure("graph has no edges", {"r": r})
    d = g.average_degree
    half = bipartite_half(g)
    core = min_degree_peel(half, d / 4)
    if core.m == 0:
        raise RouteFailure("min-degree subgraph is empty", {"r": r})
    h, d_prime = near_regularize(core.graph, cfg, rng, trace)
    near = core.on(h)
    details: dict[str, Any] = {"r": r, "d": float(d), "d_prime": float(d_prime)}
    for name, host in (("near_regular", near), ("min_degree", core)):
        if host.graph.max_degree < r:
            continue
        hit = extract_regular(host, r, budget=cfg.search_budget)
        if hit is None:
            continue
        s, reg = hit
        out = regular_bipartite_peel(reg, s, r) if s > r else reg
        if trace is not None:
            trace.append({"stage": "extract", "host": name, "s": s, "r": r, "size": out.n})
        return out.graph
    raise RouteFailure(f"no s-regular subgraph with s >= {r} found", details)
