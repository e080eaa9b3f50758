"""Plain-text graph formats.

``graph <n> <m>`` then ``m`` lines ``u v``; ``bigraph <nA> <nB> <m>`` with
A-ids ``0..nA-1`` and B-ids ``nA..nA+nB-1``; ``hyper <r> <N> <m>`` then
``m`` lines of ``r`` vertex ids (multi-edges by repetition). Writers emit a
canonical form (sorted edges, single spaces, trailing newline), so
``write(read(write(x))) == write(x)`` byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import PreconditionError
from .graph import BipartiteGraph, Graph
from .hyper import MultiHypergraph

__all__ = [
    "format_graph",
    "format_bigraph",
    "format_hyper",
    "format_any",
    "parse",
    "read",
    "write",
    "write_sidecar",
    "read_sidecar",
    "digest",
]

SIDECAR_SUFFIX = ".json"


def _lines(header: str, rows) -> str:
    return "\n".join([header, *(" ".join(str(int(x)) for x in row) for row in rows)]) + "\n"


def format_graph(g: Graph) -> str:
    return _lines(f"graph {g.n} {g.m}", g.edges)


def format_bigraph(h: BipartiteGraph) -> str:
    n_a = len(h.part_a)
    if (h.side[:n_a] != 0).any():
        raise PreconditionError("bigraph format needs A-ids 0..nA-1; relabel first")
    return _lines(f"bigraph {n_a} {h.n - n_a} {h.m}", h.graph.edges)


def format_hyper(hg: MultiHypergraph) -> str:
    return _lines(f"hyper {hg.r} {hg.n_vertices} {hg.m}", sorted(hg.edges))


def format_any(obj) -> str:
    if isinstance(obj, BipartiteGraph):
        return format_bigraph(obj)
    if isinstance(obj, Graph):
        return format_graph(obj)
    if isinstance(obj, MultiHypergraph):
        return format_hyper(obj)
    raise PreconditionError(f"cannot serialize {type(obj).__name__}")


def _ints(tok: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tok]
    except ValueError:
        raise PreconditionError(f"line {lineno}: expected integers, got {' '.join(tok)!r}") from None


def parse(text: str) -> Graph | BipartiteGraph | MultiHypergraph:
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    rows = [(i, t) for i, t in rows if t and not t[0].startswith("#")]
    if not rows:
        raise PreconditionError("empty input")
    lineno, head = rows[0]
    kind, nums = head[0], _ints(head[1:], lineno)
    body = rows[1:]
    expect = {"graph": 2, "bigraph": 3, "hyper": 3}
    if kind not in expect:
        raise PreconditionError(f"unknown header {kind!r}")
    if len(nums) != expect[kind] or min(nums, default=0) < 0:
        raise PreconditionError(f"malformed {kind} header")
    m = nums[-1]
    if len(body) != m:
        raise PreconditionError(f"header promises {m} edges, found {len(body)}")
    width = nums[0] if kind == "hyper" else 2
    edges = []
    for i, tok in body:
        vals = _ints(tok, i)
        if len(vals) != width:
            raise PreconditionError(f"line {i}: expected {width} ids")
        edges.append(vals)
    if kind == "graph":
        return Graph(nums[0], edges)
    if kind == "bigraph":
        return BipartiteGraph.from_parts(nums[0], nums[1], edges)
    return MultiHypergraph(nums[0], nums[1], edges)


def read(path: str | Path):
    return parse(Path(path).read_text())


def write(obj, path: str | Path) -> str:
    text = format_any(obj)
    Path(path).write_text(text)
    return text


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _default(o: Any):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def write_sidecar(data: dict[str, Any], path: str | Path) -> Path:
    """JSON next to ``path`` (``foo.txt`` -> ``foo.txt.json``), sorted keys."""
    out = Path(str(path) + SIDECAR_SUFFIX)
    out.write_text(json.dumps(data, sort_keys=True, indent=2, default=_default) + "\n")
    return out


def read_sidecar(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(str(path) + SIDECAR_SUFFIX).read_text())
