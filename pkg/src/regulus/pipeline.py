"""r-regular subgraphs in graphs of average degree about ``r^2 loglog n``.

After halving and peeling, every B-vertex keeps ``D`` edges. A-vertices are
split into dyadic degree classes ``A_0, A_1, ..., A_l`` with thresholds
``2^{t_i}``. Either half of B sends half its edges into the low class
``A_0`` (case 1: an almost-biregular graph, handled by near-regularization)
or some class ``A_i`` receives at least ``r`` edges from many B-vertices
(case 2: an r-uniform multi-hypergraph, handled by sunflowers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .config import DEFAULT, ConstantsConfig
from .errors import (ConsistencyError, LasVegasFailure, PreconditionError, RouteFailure,
                     SearchBudgetExceeded)
from .graph import BipartiteGraph, Graph, bipartite_half, dyadic_degree_classes, min_degree_peel
from .hyper import bipartite_to_hyper, hyper_to_bipartite_regular, regular_subhypergraph
from .nearreg import regular_in_almost_regular

__all__ = [
    "AlmostBiregularDescriptor",
    "ErdosSauerTrace",
    "loglog",
    "class_thresholds",
    "truncate_b_degrees",
    "classify_cases",
    "case1_route",
    "case2_route",
    "jsr_substitute",
    "erdos_sauer",
]


def loglog(n: int) -> float:
    """``log log n`` in base 2, floored at 1 so tiny graphs get usable thresholds."""
    if n < 2:
        return 1.0
    return max(1.0, math.log2(math.log2(n)))


@dataclass(frozen=True)
class AlmostBiregularDescriptor:
    """``(L, s)``: B-degrees all ``s``, ``d = e/|A| >= s``, A-degrees at most ``L d``."""

    L: float
    s: int
    d: Fraction

    @classmethod
    def of(cls, h: BipartiteGraph, L: float) -> "AlmostBiregularDescriptor":
        b_deg = h.degrees[h.part_b]
        if len(b_deg) == 0 or len(h.part_a) == 0:
            raise PreconditionError("both sides must be nonempty")
        return cls(float(L), int(b_deg[0]), Fraction(h.m, len(h.part_a)))

    def violations(self, h: BipartiteGraph) -> list[str]:
        out = []
        if self.L < 1:
            out.append("L < 1")
        if (h.degrees[h.part_b] != self.s).any():
            out.append("B-degrees are not all s")
        if self.d != Fraction(h.m, max(len(h.part_a), 1)):
            out.append("d != e/|A|")
        if self.d < self.s:
            out.append("d < s (|A| > |B|)")
        if len(h.part_a) and h.degrees[h.part_a].max() > self.L * self.d:
            out.append("some A-degree exceeds L d")
        return out


@dataclass
class ErdosSauerTrace:
    """Everything decided by the case split, plus the route's intermediate graphs."""

    n: int
    r: int
    lln: float
    D: int
    t0: float
    ell: int
    ts: tuple[float, ...]
    h: BipartiteGraph
    classes: tuple[tuple[int, ...], ...]
    case: int
    index: int
    b_prime: tuple[int, ...]
    case1_holds: bool
    case2_index: int | None
    b_double: tuple[int, ...] = ()
    h_prime: BipartiteGraph | None = None
    events: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n, "r": self.r, "loglog_n": self.lln, "D": self.D, "t0": self.t0,
            "ell": self.ell, "ts": list(self.ts), "class_sizes": [len(c) for c in self.classes],
            "case": self.case, "index": self.index, "b_size": len(self.h.part_b),
            "b_prime": len(self.b_prime), "b_double": len(self.b_double),
            "case1_holds": self.case1_holds, "case2_index": self.case2_index,
            "h": {"n": self.h.n, "m": self.h.m},
            "h_prime": None if self.h_prime is None else {"n": self.h_prime.n, "m": self.h_prime.m},
            "events": self.events,
        }


def class_thresholds(n: int, r: int, cfg: ConstantsConfig = DEFAULT) -> tuple[float, ...]:
    """``t_i = t_0 (1 + 1/(3r))^i`` for ``i = 0..l`` with ``l`` minimal such that ``t_l >= log n``."""
    t0 = cfg.es_t0_scale * r * loglog(n)
    target = math.log2(max(n, 2))
    ts = [t0]
    while ts[-1] < target:
        ts.append(t0 * (1 + 1 / (3 * r)) ** len(ts))
    return tuple(ts)


def _keep_per_b(h: BipartiteGraph, k: int, rng: np.random.Generator,
                allowed: np.ndarray | None = None) -> np.ndarray:
    """Edge mask keeping ``k`` uniformly random edges at every B-vertex (into ``allowed`` A-vertices)."""
    e = h.graph.edges
    b_end = np.where(h.side[e[:, 0]] == 1, e[:, 0], e[:, 1])
    a_end = np.where(h.side[e[:, 0]] == 1, e[:, 1], e[:, 0])
    ok = np.ones(h.m, dtype=bool) if allowed is None else allowed[a_end]
    keys = rng.random(h.m)
    keys[~ok] = np.inf
    order = np.lexsort((keys, b_end))
    ranks = np.empty(h.m, dtype=np.int64)
    sorted_b = b_end[order]
    starts = np.searchsorted(sorted_b, sorted_b, side="left")
    ranks[order] = np.arange(h.m) - starts
    return ok & (ranks < k)


def truncate_b_degrees(h: BipartiteGraph, D: int, rng: np.random.Generator) -> BipartiteGraph:
    """Spanning subgraph in which every B-vertex keeps exactly ``D`` random edges."""
    if (h.degrees[h.part_b] < D).any():
        raise PreconditionError(f"some B-vertex has degree below {D}")
    return h.restrict(None, _keep_per_b(h, D, rng))


def _neighbors_in(h: BipartiteGraph, members: np.ndarray) -> np.ndarray:
    """For every vertex, the number of neighbors flagged in ``members``."""
    e = h.graph.edges
    cnt = np.zeros(h.n, dtype=np.int64)
    np.add.at(cnt, e[:, 0], members[e[:, 1]])
    np.add.at(cnt, e[:, 1], members[e[:, 0]])
    return cnt


def classify_cases(h: BipartiteGraph, r: int, cfg: ConstantsConfig = DEFAULT,
                   n: int | None = None) -> ErdosSauerTrace:
    """Dyadic class split and case decision (case 1 preferred when both hold).

    ``n`` is the vertex count of the original graph (defaults to ``h.n``).
    Raises :class:`ConsistencyError` if neither case holds, which can only
    happen when scaled constants make ``D / (2 l) < r``.
    """
    if r < 1:
        raise PreconditionError("r must be positive")
    b = h.part_b
    if len(b) == 0 or len(h.part_a) == 0:
        raise PreconditionError("both sides must be nonempty")
    b_deg = h.degrees[b]
    D = int(b_deg[0])
    if (b_deg != D).any():
        raise PreconditionError("all B-degrees must be equal")
    n = h.n if n is None else n
    ts = class_thresholds(n, r, cfg)
    ell = len(ts) - 1
    lln = loglog(n)
    if ts[-1] < math.log2(max(n, 2)) or (ell and ell > 6 * r * lln):
        raise ConsistencyError("class threshold arithmetic failed")
    classes = dyadic_degree_classes(h, ts)

    flags = np.zeros(h.n, dtype=bool)
    flags[list(classes[0])] = True
    into0 = _neighbors_in(h, flags)[b]
    case1 = b[2 * into0 >= D]
    case1_holds = 2 * len(case1) >= len(b)

    case2_index, case2_b = None, np.zeros(0, dtype=np.int64)
    for i in range(1, ell + 1):
        flags[:] = False
        flags[list(classes[i])] = True
        qual = b[_neighbors_in(h, flags)[b] >= r]
        if 2 * ell * len(qual) >= len(b) and len(qual) > len(case2_b):
            case2_index, case2_b = i, qual
    if case1_holds:
        case, index, b_prime = 1, 0, case1
    elif case2_index is not None:
        case, index, b_prime = 2, case2_index, case2_b
    else:
        raise ConsistencyError(f"neither case holds (D={D}, l={ell}, r={r})")
    return ErdosSauerTrace(n=n, r=r, lln=lln, D=D, t0=ts[0], ell=ell, ts=ts, h=h,
                           classes=tuple(classes), case=case, index=index,
                           b_prime=tuple(int(x) for x in b_prime), case1_holds=bool(case1_holds),
                           case2_index=case2_index)


def _capped_core(h: BipartiteGraph, keep_a: np.ndarray) -> tuple[Graph | None, float]:
    """Restrict A to ``keep_a``, cap both sides at ``2T`` and peel at ``T/32``."""
    sub = h.restrict(np.concatenate([keep_a, h.part_b]))
    sub = sub.restrict(np.flatnonzero(sub.degrees > 0))
    if sub.m == 0:
        return None, 0.0
    T = min(Fraction(sub.m, len(sub.part_a)), Fraction(sub.m, len(sub.part_b)))
    cap = math.floor(2 * T)
    load = np.zeros(sub.n, dtype=np.int64)
    mask = np.zeros(sub.m, dtype=bool)
    for i, (u, v) in enumerate(sub.graph.edges.tolist()):
        if load[u] < cap and load[v] < cap:
            load[u] += 1
            load[v] += 1
            mask[i] = True
    out = min_degree_peel(sub.restrict(None, mask), T / 32)
    return (out.graph if out.m else None), float(T)


def jsr_substitute(h: BipartiteGraph, desc: AlmostBiregularDescriptor,
                   cfg: ConstantsConfig = DEFAULT) -> Graph:
    """Almost-regular subgraph of an almost-biregular graph.

    A-vertices are grouped into dyadic degree classes. For every run of
    consecutive classes, A is restricted to the run, both sides are capped
    at ``2T`` (``T`` the smaller side average) and the result is peeled at
    ``T/32``, so its max/min ratio is at most 64. The candidate with the
    largest average degree is returned; it must have ratio at most
    ``cfg.jsr_ratio`` and average degree at least
    ``s / (cfg.jsr_log_factor log L)``.
    """
    bad = desc.violations(h)
    if bad:
        raise PreconditionError("not almost-biregular: " + "; ".join(bad))
    if desc.s < 2 or desc.L < desc.s:
        raise PreconditionError("need L >= s >= 2")
    a = h.part_a
    a_deg = h.degrees[a]
    cls = np.zeros(len(a), dtype=np.int64)
    pos = a_deg > 1
    cls[pos] = np.ceil(np.log2(a_deg[pos])).astype(np.int64)
    present = sorted(set(cls[a_deg > 0].tolist()))
    target = desc.s / (cfg.jsr_log_factor * math.log2(desc.L)) if desc.L > 1 else desc.s
    best, best_info = None, {}
    for i in range(len(present)):
        for j in range(i, len(present)):
            sel = (cls >= present[i]) & (cls <= present[j]) & (a_deg > 0)
            g, T = _capped_core(h, a[sel])
            if g is None:
                continue
            ratio = g.max_degree / g.min_degree
            if ratio > cfg.jsr_ratio:
                continue
            if best is None or g.average_degree > best.average_degree:
                best, best_info = g, {"classes": [present[i], present[j]], "T": T}
    details = {"target": target, **best_info}
    if best is None:
        raise RouteFailure("substitute produced no almost-regular candidate", details)
    avg = float(best.average_degree)
    if avg < target:
        raise RouteFailure("substitute missed its average-degree contract", {**details, "avg": avg})
    return best


def case1_route(trace: ErdosSauerTrace, cfg: ConstantsConfig = DEFAULT,
                rng: np.random.Generator | None = None) -> Graph:
    """Almost-biregular graph on ``A_0'`` and ``B''``, then near-regularization."""
    rng = np.random.default_rng() if rng is None else rng
    if trace.case != 1:
        raise PreconditionError("trace is not case 1")
    h, r = trace.h, trace.r
    a0 = np.asarray(trace.classes[0], dtype=np.int64)
    b1 = np.asarray(trace.b_prime, dtype=np.int64)
    s_min = max(1, math.ceil(cfg.es_case1_scale * trace.D))
    chosen = None
    for attempt in range(cfg.retry_budget + 1):
        if attempt == 0:
            a0p = a0
        else:
            a0p = np.sort(rng.choice(a0, size=max(1, len(a0) // 3), replace=False))
        flags = np.zeros(h.n, dtype=bool)
        flags[a0p] = True
        cnt = np.sort(_neighbors_in(h, flags)[b1])[::-1]
        # largest s such that 2/3 of B' keep s neighbors
        need = math.ceil(2 * len(b1) / 3)
        s = int(cnt[need - 1]) if need and need <= len(cnt) else 0
        if s < s_min:
            continue
        b2 = b1[_neighbors_in(h, flags)[b1] >= s]
        if len(a0p) <= len(b2):
            chosen = (a0p, b2, s)
            break
    if chosen is None:
        raise LasVegasFailure("no A_0' leaves 2|B'|/3 vertices with enough neighbors",
                              {"A0": len(a0), "B'": len(b1), "s_min": s_min})
    a0p, b2, s = chosen
    allowed = np.zeros(h.n, dtype=bool)
    allowed[a0p] = True
    sub = h.restrict(np.concatenate([a0p, b2]))
    allowed_sub = allowed[sub.graph.origin]
    hp = sub.restrict(None, _keep_per_b(sub, s, rng, allowed_sub))
    trace.b_double = tuple(int(x) for x in b2)
    trace.h_prime = hp
    L = max(2.0 ** trace.t0, float(s))
    desc = AlmostBiregularDescriptor.of(hp, L)
    bad = desc.violations(hp)
    if bad:
        raise ConsistencyError("case 1 graph is not almost-biregular: " + "; ".join(bad))
    trace.events.append({"stage": "case1", "A0'": len(a0p), "B''": len(b2), "s": s,
                         "s_min": s_min, "L": L, "d": float(desc.d)})
    if s < 2:
        raise RouteFailure("almost-biregular degree s < 2", {"s": s})
    almost = jsr_substitute(hp, desc, cfg)
    trace.events.append({"stage": "jsr_substitute", "n": almost.n, "m": almost.m,
                         "min": almost.min_degree, "max": almost.max_degree})
    return regular_in_almost_regular(almost, r, cfg, rng, trace.events)


def case2_route(trace: ErdosSauerTrace, r: int, cfg: ConstantsConfig = DEFAULT,
                rng: np.random.Generator | None = None) -> Graph:
    """Keep ``r`` edges from each ``B'`` vertex into ``A_i``; solve as a hypergraph."""
    rng = np.random.default_rng() if rng is None else rng
    if trace.case != 2:
        raise PreconditionError("trace is not case 2")
    h = trace.h
    ai = np.asarray(trace.classes[trace.index], dtype=np.int64)
    b1 = np.asarray(trace.b_prime, dtype=np.int64)
    allowed = np.zeros(h.n, dtype=bool)
    allowed[ai] = True
    sub = h.restrict(np.concatenate([ai, b1]))
    hp = sub.restrict(None, _keep_per_b(sub, r, rng, allowed[sub.graph.origin]))
    hp = hp.restrict(np.flatnonzero(hp.degrees > 0))
    trace.h_prime = hp
    hg = bipartite_to_hyper(hp, r)
    d = float(hg.average_degree)
    threshold = r ** (3 * r) * math.log2(max(trace.n, 2)) ** 2
    trace.events.append({"stage": "case2", "A_i": len(ai), "B'": len(b1), "N": hg.n_vertices,
                         "edges": hg.m, "d": d, "max": hg.max_degree,
                         "threshold_met": d >= threshold})
    sub_h = regular_subhypergraph(hg, r, cfg, rng, trace.events)
    if sub_h is None:
        raise RouteFailure("no regular sub-hypergraph", {"N": hg.n_vertices, "edges": hg.m})
    return hyper_to_bipartite_regular(sub_h, hp).graph


def erdos_sauer(g: Graph, r: int, cfg: ConstantsConfig = DEFAULT,
                rng: np.random.Generator | None = None,
                trace: list | None = None) -> Graph:
    """r-regular subgraph through the case split; raises :class:`RouteFailure` with the trace.

    bipartite half -> minimum degree half the average -> ``|A| <= |B|`` ->
    every B-vertex keeps ``D = min(delta_B, ceil(scale r^2 loglog n))``
    edges -> case split -> route. When the preferred route fails and the
    other case also holds, the other route is tried.
    """
    if r < 1:
        raise PreconditionError("r must be positive")
    if g.m == 0:
        raise RouteFailure("graph has no edges", {"r": r})
    rng = np.random.default_rng() if rng is None else rng
    events: list = [] if trace is None else trace
    half = bipartite_half(g)
    core = min_degree_peel(half, half.graph.average_degree / 2)
    if len(core.part_a) > len(core.part_b):
        core = core.swapped()
    lln = loglog(g.n)
    delta_b = int(core.degrees[core.part_b].min())
    D = min(delta_b, math.ceil(cfg.es_degree_scale * r * r * lln))
    events.append({"stage": "erdos_sauer", "n": g.n, "m": g.m, "r": r, "core_n": core.n,
                   "core_m": core.m, "delta_B": delta_b, "D": D})
    if D < r:
        raise RouteFailure(f"B-side minimum degree {delta_b} is below r", {"events": events})
    h = truncate_b_degrees(core, D, rng)
    try:
        es = classify_cases(h, r, cfg, n=g.n)
    except ConsistencyError as exc:
        raise RouteFailure(str(exc), {"events": events}) from exc
    es.events = events
    events.append({"stage": "classify", **{k: v for k, v in es.to_dict().items()
                                           if k not in ("events", "h", "h_prime")}})
    routes = [es.case]
    if es.case == 1 and es.case2_index is not None:
        routes.append(2)
    failures = []
    for case in routes:
        try:
            if case == 1:
                out = case1_route(es, cfg, rng)
            else:
                if es.case != 2:
                    es.case, es.index = 2, es.case2_index
                    flags = np.zeros(h.n, dtype=bool)
                    flags[list(es.classes[es.index])] = True
                    b = h.part_b
                    es.b_prime = tuple(int(x) for x in b[_neighbors_in(h, flags)[b] >= r])
                out = case2_route(es, r, cfg, rng)
            events.append({"stage": "done", "case": case, "n": out.n, "m": out.m})
            return out
        except (RouteFailure, LasVegasFailure, SearchBudgetExceeded) as exc:
            failures.append({"case": case, "error": type(exc).__name__, "message": str(exc)})
            events.append({"stage": "route_failed", **failures[-1]})
    raise RouteFailure("every applicable route failed", {"failures": failures, "events": events})
