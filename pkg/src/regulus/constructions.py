"""Layered random bipartite graphs with many edges and no dense regular subgraph.

``small_r``: a set ``A`` of ``n`` vertices and layers ``B_i`` of size
``n / 2^(2^(20 i / r))`` for ``i_min <= i <= i_max``; each A-vertex picks
``floor(r/8)`` random neighbors in every layer.

``large_r``: ``|A| = n/2`` and layers ``|B_i| = 2^i r`` for
``i = 1..l`` with ``l = log(n/r) / 2``; each A-B_i pair is an edge with
probability ``1 / (100 2^i)``. Isolated vertices pad the graph to ``n``.

Default constants make faithful instances astronomically large, so every
constant can be overridden; tiny presets are certified by the exact oracle.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import PreconditionError
from .graph import BipartiteGraph, Graph

__all__ = [
    "ConstructionSpec",
    "Construction",
    "Layer",
    "small_r_range",
    "small_r_layers",
    "gen_small_r",
    "large_r_layers",
    "gen_large_r",
    "large_r_expected_edges",
    "small_r_edge_formula",
    "WitnessVerdict",
    "sparse_witness_check",
    "PRESETS",
    "preset",
]

SMALL_R_DEFAULTS = {"layer_coeff": 1 / 20, "exp_scale": 20.0}
LARGE_R_DEFAULTS = {"p_scale": 100.0}


@dataclass(frozen=True)
class ConstructionSpec:
    """What to generate. Recognized overrides:

    small_r: ``layer_coeff`` (1/20), ``exp_scale`` (20), ``i_min``, ``i_max``,
    ``per_layer`` (``floor(r/8)``).
    large_r: ``p_scale`` (100), ``ell``.
    """

    kind: str
    n: int
    r: int
    seed: int = 0
    overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("small_r", "large_r"):
            raise PreconditionError(f"unknown construction kind {self.kind!r}")
        if self.n < 1 or self.r < 1:
            raise PreconditionError("need n, r >= 1")
        known = {"small_r": {"layer_coeff", "exp_scale", "i_min", "i_max", "per_layer"},
                 "large_r": {"p_scale", "ell"}}[self.kind]
        for k, v in self.overrides.items():
            if k not in known:
                raise PreconditionError(f"unknown override {k!r} for {self.kind}")
            if v <= 0:
                raise PreconditionError(f"override {k} must be positive")

    def get(self, key: str, default):
        return self.overrides.get(key, default)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ConstructionSpec":
        return cls(d["kind"], int(d["n"]), int(d["r"]), int(d.get("seed", 0)),
                   dict(d.get("overrides", {})))


@dataclass(frozen=True)
class Layer:
    index: int
    start: int
    size: int
    degree: int  # per-A-vertex degree into the layer (small_r) or 0 (large_r)
    log2_size: float  # unrounded size exponent
    prob: float = 0.0
    clamped: bool = False


@dataclass(frozen=True)
class Construction:
    spec: ConstructionSpec
    graph: BipartiteGraph
    layers: tuple[Layer, ...]
    report: dict[str, Any]


def small_r_range(spec: ConstructionSpec) -> tuple[float, float]:
    """``(i_min, i_max)`` as reals: ``c r log r + r`` and ``c r loglog n - r``."""
    r, n = spec.r, spec.n
    c = spec.get("layer_coeff", SMALL_R_DEFAULTS["layer_coeff"])
    lln = math.log2(math.log2(n)) if n > 2 else 0.0
    i_min = spec.get("i_min", c * r * math.log2(r) + r)
    i_max = spec.get("i_max", c * r * lln - r)
    return float(i_min), float(i_max)


def small_r_layers(spec: ConstructionSpec) -> list[tuple[int, float]]:
    """``(i, log2 |B_i|)`` for the integer layer indices, before rounding."""
    i_min, i_max = small_r_range(spec)
    lo, hi = math.ceil(i_min - 1e-9), math.floor(i_max + 1e-9)
    if lo > hi:
        raise PreconditionError(f"empty layer range: i_min={i_min:.3f}, i_max={i_max:.3f}")
    scale = spec.get("exp_scale", SMALL_R_DEFAULTS["exp_scale"])
    out = []
    for i in range(lo, hi + 1):
        e = scale * i / spec.r
        log_size = math.log2(spec.n) - (2.0 ** e if e < 1024 else math.inf)
        out.append((i, log_size))
    return out


def small_r_edge_formula(spec: ConstructionSpec) -> int:
    """``n (i_max - i_min + 1) floor(r/8)`` with the integer layer count."""
    k = int(spec.get("per_layer", spec.r // 8))
    return spec.n * len(small_r_layers(spec)) * k


def gen_small_r(spec: ConstructionSpec) -> Construction:
    if spec.kind != "small_r":
        raise PreconditionError("spec is not small_r")
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    k = int(spec.get("per_layer", spec.r // 8))
    if k < 1:
        raise PreconditionError("per-layer degree floor(r/8) is zero; override per_layer")
    layers = []
    start = n
    edges = []
    for i, log_size in small_r_layers(spec):
        raw = 2.0 ** log_size if log_size > -1074 else 0.0
        size = max(1, math.ceil(raw - 1e-9))
        deg = min(k, size)
        layers.append(Layer(i, start, size, deg, log_size, clamped=(raw < 1 or deg < k)))
        for a in range(n):
            picks = rng.choice(size, size=deg, replace=False)
            edges.extend((a, start + int(b)) for b in picks)
        start += size
    total_b = start - n
    g = BipartiteGraph.from_parts(n, total_b, edges)
    report = {
        "kind": "small_r", "n": n, "r": spec.r, "seed": spec.seed,
        "i_range": list(small_r_range(spec)), "layers": [asdict(x) for x in layers],
        "vertices": g.n, "edges": g.m, "formula_edges": small_r_edge_formula(spec),
        "clamped": any(x.clamped for x in layers),
        "average_degree": float(g.graph.average_degree) if g.n else 0.0,
        "at_most_2n": g.n <= 2 * n,
    }
    return Construction(spec, g, tuple(layers), report)


def large_r_layers(spec: ConstructionSpec) -> list[tuple[int, int, float]]:
    """``(i, |B_i|, p_i)`` for ``i = 1..l``."""
    n, r = spec.n, spec.r
    ell = int(spec.get("ell", math.floor(0.5 * math.log2(n / r)))) if n > r else 0
    p_scale = spec.get("p_scale", LARGE_R_DEFAULTS["p_scale"])
    return [(i, (2 ** i) * r, min(1.0, 1.0 / (p_scale * 2 ** i))) for i in range(1, ell + 1)]


def large_r_expected_edges(spec: ConstructionSpec) -> float:
    """Exact expectation ``sum_i |A| |B_i| p_i`` (equals ``n r log(n/r) / 400`` at the defaults)."""
    half = spec.n // 2
    return float(sum(half * size * p for _, size, p in large_r_layers(spec)))


def gen_large_r(spec: ConstructionSpec) -> Construction:
    if spec.kind != "large_r":
        raise PreconditionError("spec is not large_r")
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    half = n // 2
    start = half
    layers = []
    chunks = []
    for i, size, p in large_r_layers(spec):
        mask = rng.random((half, size)) < p
        a, b = np.nonzero(mask)
        chunks.append(np.stack([a, b + start], axis=1))
        layers.append(Layer(i, start, size, 0, math.log2(size), prob=p))
        start += size
    if start > n:
        raise PreconditionError(f"layers need {start} vertices but n={n}")
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    side = np.ones(n, dtype=np.int8)
    side[:half] = 0
    g = BipartiteGraph(Graph(n, edges), side)
    report = {
        "kind": "large_r", "n": n, "r": spec.r, "seed": spec.seed,
        "layers": [asdict(x) for x in layers], "vertices": g.n, "edges": g.m,
        "expected_edges": large_r_expected_edges(spec), "padding": n - start,
        "average_degree": float(g.graph.average_degree),
    }
    return Construction(spec, g, tuple(layers), report)


@dataclass(frozen=True)
class WitnessVerdict:
    """``pass``: no violating set; ``fail``: ``witness`` violates; ``indeterminate``: budget ran out."""

    status: str
    witness: tuple[int, ...] | None = None
    value: int = 0
    nodes: int = 0


def _densest(adj: list[set[int]], cand: list[int], k: int, need: int, budget: int
             ) -> tuple[str, tuple[int, ...] | None, int, int]:
    """Branch and bound for a set of ``k`` candidates spanning at least ``need`` edges."""
    cand = sorted(cand, key=lambda v: -len(adj[v] & set(cand)))
    cset = set(cand)
    inner = {v: adj[v] & cset for v in cand}
    best = [0, None]
    nodes = 0
    chosen: list[int] = []

    def bound(pos: int, cur: int, conn: dict[int, int]) -> float:
        q = k - len(chosen)
        if q <= 0:
            return cur
        gains = sorted((conn.get(v, 0) + min(len(inner[v]), q - 1) / 2
                        for v in cand[pos:]), reverse=True)[:q]
        return cur + sum(gains)

    def rec(pos: int, cur: int, conn: dict[int, int]) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TimeoutError
        if cur > best[0] or best[1] is None:
            best[0], best[1] = cur, tuple(chosen)
        if cur >= need:
            return True
        if len(chosen) == k or pos == len(cand):
            return False
        if bound(pos, cur, conn) < need:
            return False
        v = cand[pos]
        gain = conn.get(v, 0)
        chosen.append(v)
        new_conn = dict(conn)
        for w in inner[v]:
            new_conn[w] = new_conn.get(w, 0) + 1
        if rec(pos + 1, cur + gain, new_conn):
            return True
        chosen.pop()
        return rec(pos + 1, cur, conn)

    try:
        found = rec(0, 0, {})
    except TimeoutError:
        return "indeterminate", None, best[0], nodes
    if found:
        return "fail", tuple(sorted(best[1])), best[0], nodes
    return "pass", None, best[0], nodes


def sparse_witness_check(g: Graph | BipartiteGraph, m: int, r: int, mode: str = "small_r",
                         allowed=None, budget: int = 200_000) -> WitnessVerdict:
    """Search for a set violating the sparsity claim behind a construction.

    ``small_r``: a set ``S`` (inside ``allowed``) with ``|S| <= m`` and
    ``e(G[S]) >= m r / 8``. ``large_r``: ``A' ⊆ A`` and ``B' ⊆ allowed``
    with ``|A'|, |B'| <= m`` and ``e(A', B') > m r / 2``. Exact within
    ``budget`` search nodes.
    """
    if m < 1 or r < 1:
        raise PreconditionError("need m, r >= 1")
    host = g.graph if isinstance(g, BipartiteGraph) else g
    verts = list(range(host.n)) if allowed is None else sorted(int(v) for v in allowed)
    adj = [set(a) for a in host.adjacency]
    if mode == "small_r":
        need = math.ceil(m * r / 8)
        if need == 0:
            return WitnessVerdict("fail", (), 0, 0)
        status, wit, val, nodes = _densest(adj, verts, min(m, len(verts)), need, budget)
        return WitnessVerdict(status, wit, val, nodes)
    if mode == "large_r":
        if not isinstance(g, BipartiteGraph):
            raise PreconditionError("large_r mode needs a bipartite graph")
        need = m * r // 2 + 1
        a_side = g.part_a.tolist()
        b_side = [v for v in verts if g.side[v] == 1]
        k = min(m, len(b_side))
        nodes = 0
        best = 0
        for bset in itertools.combinations(b_side, k):
            nodes += 1
            if nodes > budget:
                return WitnessVerdict("indeterminate", None, best, nodes)
            bs = set(bset)
            counts = sorted(((len(adj[a] & bs), a) for a in a_side), reverse=True)[:m]
            val = sum(c for c, _ in counts)
            best = max(best, val)
            if val >= need:
                return WitnessVerdict("fail", tuple(sorted([a for _, a in counts] + list(bset))),
                                      val, nodes)
        return WitnessVerdict("pass", None, best, nodes)
    raise PreconditionError(f"unknown mode {mode!r}")


# Tiny shape-faithful instances; the stored verdict is re-checked by the test suite.
PRESETS: dict[str, dict[str, Any]] = {
    "tiny_small_r": {"spec": {"kind": "small_r", "n": 64, "r": 8, "seed": 1,
                              "overrides": {"i_min": 1, "i_max": 3, "exp_scale": 8}},
                     "no_regular": 8},
    "tiny_large_r": {"spec": {"kind": "large_r", "n": 128, "r": 6, "seed": 0,
                              "overrides": {"p_scale": 10}},
                     "no_regular": 6},
    "dense_large_r": {"spec": {"kind": "large_r", "n": 64, "r": 3, "seed": 0,
                               "overrides": {"p_scale": 2}},
                      "no_regular": 3},
}


def preset(name: str) -> Construction:
    if name not in PRESETS:
        raise PreconditionError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    spec = ConstructionSpec.from_dict(PRESETS[name]["spec"])
    return gen_small_r(spec) if spec.kind == "small_r" else gen_large_r(spec)
