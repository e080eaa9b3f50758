"""Command-line front end: gen, regularize, verify, oracle, experiment.

Exit codes: 0 success, 2 route failure, 3 indeterminate (budget), 4 invalid input.
Every command prints a JSON report; ``--out`` files get a ``.json`` sidecar.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys
import time
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io
from .almostreg import almost_regular_subgraph, regular_by_regularization
from .config import DEFAULT, ConstantsConfig, time_hint
from .constructions import PRESETS, ConstructionSpec, gen_large_r, gen_small_r, preset
from .errors import (ConsistencyError, LasVegasFailure, PreconditionError, RouteFailure,
                     SearchBudgetExceeded)
from .generators import gnp
from .graph import BipartiteGraph, Graph, degree_summary
from .hyper import MultiHypergraph, bipartite_to_hyper, is_regular_hypergraph, regular_subhypergraph
from .oracle import (FOUND, INDETERMINATE, SearchBudget, find_regular_subgraph_exact,
                     is_r_regular, max_regular_degree)
from .pipeline import erdos_sauer

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ROUTE, EXIT_INDETERMINATE, EXIT_INVALID = 0, 2, 3, 4
METHODS = ("es", "logn", "almostreg", "hyper")


class InvalidInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for route failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def stage_seed(seed: int, stage: str) -> np.random.SeedSequence:
    """Independent stream per named stage: ``SeedSequence([seed, crc32(stage)])``."""
    return np.random.SeedSequence([seed, zlib.crc32(stage.encode())])


def stage_rng(seed: int, stage: str) -> np.random.Generator:
    return np.random.default_rng(stage_seed(seed, stage))


@dataclass
class RunReport:
    command: str
    config: dict[str, Any]
    seed: int | None
    input_digest: str | None = None
    trace: list[dict[str, Any]] = field(default_factory=list)
    verdict: str = "pending"
    certified: bool | None = None
    wall_time: float = 0.0
    output: str | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"schema": SCHEMA_VERSION, "command": self.command, "config": self.config,
                "seed": self.seed, "input_digest": self.input_digest, "trace": self.trace,
                "verdict": self.verdict, "certified": self.certified,
                "wall_time": self.wall_time, "output": self.output, "details": self.details}


def config_from_args(args) -> ConstantsConfig:
    changes = {}
    for flag, name in [("slack", "slack"), ("c_scale", "c_scale"), ("alpha", "alpha"),
                       ("retry_budget", "retry_budget"), ("search_budget", "search_budget")]:
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    try:
        return DEFAULT.replace(**changes)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    try:
        return io.parse(text), io.digest(text)
    except PreconditionError as exc:
        raise InvalidInput(f"{path}: {exc}") from None


def _plain(obj) -> Graph:
    return obj.graph if isinstance(obj, BipartiteGraph) else obj


def _lift(sub: Graph, n: int) -> Graph:
    """Subgraph written on the input's vertex ids."""
    return Graph(n, sorted(sub.root_edges()))


def _emit(report: RunReport, out: str | None) -> None:
    data = report.to_dict()
    if out:
        io.write_sidecar(data, out)
    print(json.dumps(data, sort_keys=True, default=io._default))


# -- gen -------------------------------------------------------------------

def _parse_overrides(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidInput(f"override {item!r} is not key=value")
        try:
            out[key] = float(value)
        except ValueError:
            raise InvalidInput(f"override {item!r} has a non-numeric value") from None
    return out


def generate(args) -> tuple[Any, dict[str, Any]]:
    if args.preset:
        c = preset(args.preset)
        return c.graph, {**c.report, "spec": json.loads(c.spec.to_json()), "preset": args.preset,
                         "preset_no_regular": PRESETS[args.preset]["no_regular"]}
    if not (args.kind and args.n and args.r):
        raise InvalidInput("gen needs --preset or all of --kind, --n, --r")
    spec = ConstructionSpec(args.kind, args.n, args.r, args.seed,
                            _parse_overrides(args.override))
    c = gen_small_r(spec) if spec.kind == "small_r" else gen_large_r(spec)
    return c.graph, {**c.report, "spec": json.loads(spec.to_json())}


def cmd_gen(args) -> int:
    t0 = time.perf_counter()
    graph, rep = generate(args)
    text = io.format_any(graph)
    if args.out:
        Path(args.out).write_text(text)
    s = degree_summary(graph)
    rep["degrees"] = {"min": s.min_deg, "max": s.max_deg, "avg": float(s.avg_deg)}
    report = RunReport("gen", {}, args.seed, verdict="ok", output=args.out,
                       details=rep, input_digest=io.digest(text))
    report.wall_time = 0.0 if args.out else time.perf_counter() - t0
    _emit(report, args.out)
    return EXIT_OK


# -- regularize ------------------------------------------------------------

def run_method(obj, method: str, r: int | None, cfg: ConstantsConfig,
               rng: np.random.Generator, trace: list):
    """Dispatch to a route; returns the result object (graph or hypergraph)."""
    if method == "hyper":
        if isinstance(obj, BipartiteGraph):
            b_deg = obj.degrees[obj.part_b]
            if len(b_deg) == 0 or (b_deg != b_deg[0]).any():
                raise InvalidInput("hyper on a bigraph needs all B-degrees equal")
            hg = bipartite_to_hyper(obj, int(b_deg[0]))
        elif isinstance(obj, MultiHypergraph):
            hg = obj
        else:
            raise InvalidInput("method hyper needs a hyper or bigraph input")
        sub = regular_subhypergraph(hg, r, cfg, rng, trace)
        if sub is None:
            raise RouteFailure("no regular sub-hypergraph", {"N": hg.n_vertices, "m": hg.m})
        return sub
    if isinstance(obj, MultiHypergraph):
        raise InvalidInput(f"method {method} needs a graph input")
    g = _plain(obj)
    if method == "almostreg":
        return almost_regular_subgraph(g, trace=trace)
    if r is None or r < 1:
        raise InvalidInput(f"method {method} needs --r >= 1")
    if method == "es":
        return erdos_sauer(g, r, cfg, rng, trace)
    return regular_by_regularization(g, r, cfg, rng, trace)


def certify(obj, result, method: str, r: int | None) -> bool:
    if isinstance(result, MultiHypergraph):
        # bigraph inputs are converted; containment is checked on the hypergraph
        contained = (not isinstance(obj, MultiHypergraph)
                     or not (Counter(result.edges) - Counter(obj.edges)))
        return contained and is_regular_hypergraph(result, r)
    host = _plain(obj)
    sub_ok = result.root_edges() <= host.root_edges()
    if method == "almostreg":
        return sub_ok and result.m > 0 and result.max_degree <= 4 * result.min_degree
    return sub_ok and is_r_regular(result, r)


def regularize_once(obj, method: str, r: int | None, cfg: ConstantsConfig, seed: int):
    """Run one route; returns ``(exit code, result or None, trace, details)``."""
    trace: list = []
    rng = stage_rng(seed, f"regularize/{method}")
    try:
        result = run_method(obj, method, r, cfg, rng, trace)
    except (RouteFailure, LasVegasFailure, ConsistencyError) as exc:
        details = getattr(exc, "details", None) or getattr(exc, "diagnostics", None) or {}
        return EXIT_ROUTE, None, trace, {"error": type(exc).__name__, "message": str(exc),
                                         "failure": details}
    except SearchBudgetExceeded as exc:
        return EXIT_INDETERMINATE, None, trace, {"error": "SearchBudgetExceeded",
                                                 "message": str(exc)}
    ok = certify(obj, result, method, r)
    if not ok:
        raise ConsistencyError("route output failed certification")
    return EXIT_OK, result, trace, {}


def cmd_regularize(args) -> int:
    cfg = config_from_args(args)
    obj, dig = _load(args.input)
    if args.method != "almostreg" and args.r is None:
        raise InvalidInput(f"method {args.method} needs --r")
    t0 = time.perf_counter()
    code, result, trace, details = regularize_once(obj, args.method, args.r, cfg, args.seed)
    report = RunReport("regularize", cfg.to_dict(), args.seed, dig, trace,
                       details={"method": args.method, "r": args.r, **details})
    report.wall_time = time.perf_counter() - t0
    if result is None:
        report.verdict = "route_failure" if code == EXIT_ROUTE else INDETERMINATE
        report.certified = False
    else:
        report.verdict, report.certified = "success", True
        if isinstance(result, MultiHypergraph):
            out_obj = result
            report.details["edges"] = result.m
        else:
            out_obj = _lift(result, _plain(obj).n)
            report.details.update({"vertices": result.n, "edges": result.m,
                                   "max_degree": result.max_degree,
                                   "min_degree": result.min_degree})
        if args.out:
            io.write(out_obj, args.out)
            report.output = args.out
    _emit(report, args.out)
    return code


# -- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    host, hd = _load(args.input)
    sub, sd = _load(args.subgraph)
    details: dict[str, Any] = {"input": args.input, "subgraph": args.subgraph}
    if isinstance(host, MultiHypergraph) or isinstance(sub, MultiHypergraph):
        if not (isinstance(host, MultiHypergraph) and isinstance(sub, MultiHypergraph)):
            raise InvalidInput("verify needs two graphs or two hypergraphs")
        contained = not (Counter(sub.edges) - Counter(host.edges))
        regular = args.r is not None and is_regular_hypergraph(sub, args.r)
        ok = contained and (regular or args.almost)
    else:
        h, s = _plain(host), _plain(sub)
        contained = s.n <= h.n and s.root_edges() <= h.root_edges()
        active = s.restrict(np.flatnonzero(s.degrees > 0))
        if args.almost:
            regular = active.m > 0 and active.max_degree <= 4 * active.min_degree
        else:
            if args.r is None:
                raise InvalidInput("verify needs --r or --almost")
            regular = is_r_regular(active, args.r)
        ok = contained and regular
    details.update({"subgraph_of_input": bool(contained), "regular": bool(regular)})
    report = RunReport("verify", {}, None, hd, verdict="pass" if ok else "fail",
                       certified=bool(ok), details={**details, "subgraph_digest": sd})
    _emit(report, None)
    return EXIT_OK if ok else EXIT_ROUTE


# -- oracle ----------------------------------------------------------------

def _budget(args) -> SearchBudget:
    n = args.search_budget if args.search_budget is not None else DEFAULT.search_budget
    return SearchBudget(n, time_hint())


def cmd_oracle(args) -> int:
    obj, dig = _load(args.input)
    if isinstance(obj, MultiHypergraph):
        raise InvalidInput("oracle works on graphs")
    g = _plain(obj)
    budget = _budget(args)
    t0 = time.perf_counter()
    report = RunReport("oracle", {"search_budget": budget.node_limit}, None, dig)
    code = EXIT_OK
    if args.r is None:
        try:
            report.details["max_regular_degree"] = max_regular_degree(g, budget)
            report.verdict = "ok"
        except SearchBudgetExceeded as exc:
            report.verdict, code = INDETERMINATE, EXIT_INDETERMINATE
            report.details["message"] = str(exc)
    else:
        res = find_regular_subgraph_exact(g, args.r, budget)
        report.verdict = res.status
        report.details.update({"r": args.r, "nodes": res.nodes})
        if res.status == FOUND:
            report.certified = is_r_regular(res.graph, args.r)
            if args.out:
                io.write(_lift(res.graph, g.n), args.out)
                report.output = args.out
        elif res.status == INDETERMINATE:
            code = EXIT_INDETERMINATE
    report.wall_time = time.perf_counter() - t0
    _emit(report, args.out)
    return code


# -- experiment ------------------------------------------------------------

def _ints_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise InvalidInput(f"bad integer list {text!r}") from None


def _floats_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise InvalidInput(f"bad number list {text!r}") from None


def _experiment_cell(job: tuple) -> dict[str, Any]:
    n, r, p, seed, method, cfg_dict, oracle_max_n, node_limit = job
    cfg = ConstantsConfig(**cfg_dict)
    g = gnp(n, p, stage_rng(seed, f"experiment/gnp/{n}/{p}"))
    row: dict[str, Any] = {"n": n, "r": r, "density": p, "seed": seed, "edges": g.m,
                           "avg_degree": float(g.average_degree) if n else 0.0}
    if g.m == 0:
        row.update(verdict="route_failure", success=0)
    else:
        code, result, _, _ = regularize_once(g, method, r, cfg, seed)
        row["verdict"] = {EXIT_OK: "success", EXIT_ROUTE: "route_failure"}.get(code, INDETERMINATE)
        row["success"] = int(code == EXIT_OK)
    if n <= oracle_max_n:
        try:
            row["oracle_max_regular_degree"] = max_regular_degree(g, SearchBudget(node_limit))
        except SearchBudgetExceeded:
            row["oracle_max_regular_degree"] = INDETERMINATE
    else:
        row["oracle_max_regular_degree"] = ""
    return row


def run_experiment(ns, rs, densities, seeds, method, cfg, jobs=1, oracle_max_n=12,
                   node_limit=200_000) -> tuple[list[dict], list[dict]]:
    """Per-run rows plus one summary per ``(n, r)`` cell, both in deterministic order."""
    grid = [(n, r, p, s, method, cfg.to_dict(), oracle_max_n, node_limit)
            for n in ns for r in rs for p in densities for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_experiment_cell, grid, chunksize=max(1, len(grid) // (4 * jobs))))
    else:
        rows = [_experiment_cell(job) for job in grid]
    rows.sort(key=lambda x: (x["n"], x["r"], x["density"], x["seed"]))
    cells = []
    for n in ns:
        for r in rs:
            rates = []
            for p in sorted(densities):
                sub = [x for x in rows if x["n"] == n and x["r"] == r and x["density"] == p]
                rates.append((p, sum(x["success"] for x in sub) / len(sub),
                              sum(x["verdict"] == INDETERMINATE for x in sub)))
            ok = [p for p, rate, _ in rates if rate >= 0.9]
            monotone = all(a[1] <= b[1] for a, b in zip(rates, rates[1:]))
            cells.append({"n": n, "r": r, "threshold_density": ok[0] if ok else None,
                          "rates": [[p, rate] for p, rate, _ in rates],
                          "indeterminate": sum(k for _, _, k in rates),
                          "monotone": monotone})
    return rows, cells


def cmd_experiment(args) -> int:
    cfg = config_from_args(args)
    ns, rs = _ints_list(args.ns), _ints_list(args.rs)
    densities = _floats_list(args.densities)
    if not (ns and rs and densities) or any(not 0 <= p <= 1 for p in densities):
        raise InvalidInput("need nonempty --ns, --rs and densities in [0, 1]")
    seeds = list(range(args.seed, args.seed + args.seeds))
    t0 = time.perf_counter()
    rows, cells = run_experiment(ns, rs, densities, seeds, args.method, cfg, args.jobs,
                                 args.oracle_max_n, _budget(args).node_limit)
    buf = _stdio.StringIO()
    fields = ["n", "r", "density", "seed", "edges", "avg_degree", "verdict", "success",
              "oracle_max_regular_degree"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stderr.write(buf.getvalue())
    report = RunReport("experiment", cfg.to_dict(), args.seed, verdict="ok", output=args.out,
                       details={"method": args.method, "cells": cells, "runs": len(rows)})
    report.wall_time = time.perf_counter() - t0
    _emit(report, args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slack", type=float)
    p.add_argument("--c-scale", dest="c_scale", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--retry-budget", dest="retry_budget", type=int)
    p.add_argument("--search-budget", dest="search_budget", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regulus", description="Regular subgraphs: routes, oracles, generators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a construction graph")
    g.add_argument("--kind", choices=("small_r", "large_r"))
    g.add_argument("--n", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="constant override, e.g. exp_scale=8")
    g.add_argument("--preset", choices=sorted(PRESETS))
    _add_config_flags(g)
    g.set_defaults(func=cmd_gen)

    rg = sub.add_parser("regularize", help="find a regular subgraph")
    rg.add_argument("input")
    rg.add_argument("--r", type=int)
    rg.add_argument("--method", choices=METHODS, default="es")
    _add_config_flags(rg)
    rg.set_defaults(func=cmd_regularize)

    v = sub.add_parser("verify", help="certify a subgraph file against its input")
    v.add_argument("input")
    v.add_argument("subgraph")
    v.add_argument("--r", type=int)
    v.add_argument("--almost", action="store_true", help="check 4-almost-regularity instead")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact search (max regular degree without --r)")
    o.add_argument("input")
    o.add_argument("--r", type=int)
    _add_config_flags(o)
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="success-rate grid over G(n, p)")
    e.add_argument("--ns", default="40,80")
    e.add_argument("--rs", default="2,3")
    e.add_argument("--densities", default="0.1,0.2,0.4")
    e.add_argument("--seeds", type=int, default=10, help="seeds per grid point")
    e.add_argument("--method", choices=METHODS, default="es")
    e.add_argument("--oracle-max-n", dest="oracle_max_n", type=int, default=12)
    _add_config_flags(e)
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, PreconditionError) as exc:
        print(f"regulus: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
