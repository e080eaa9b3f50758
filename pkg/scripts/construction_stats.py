"""Edge counts and sparsity checks for the layered constructions.

Samples ``large_r`` over many seeds and compares the mean edge count
with its expectation, then runs the bounded sparse-witness search on
small instances of both kinds.

    python scripts/construction_stats.py --n 4096 --r 16 --seeds 100
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from regulus.constructions import (PRESETS, ConstructionSpec, gen_large_r,
                                   large_r_expected_edges, preset, sparse_witness_check)


@dataclass
class Summary:
    n: int
    r: int
    seeds: int
    mean_edges: float
    std_edges: float
    expected_edges: float
    relative_error: float


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--r", type=int, default=16)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--witness-m", dest="witness_m", type=int, default=6)
    args = ap.parse_args(argv)
    counts = [gen_large_r(ConstructionSpec("large_r", args.n, args.r, seed=s)).graph.m
              for s in range(args.seeds)]
    expected = large_r_expected_edges(ConstructionSpec("large_r", args.n, args.r))
    mean = float(np.mean(counts))
    out = {"large_r": asdict(Summary(args.n, args.r, args.seeds, mean, float(np.std(counts)),
                                     expected, abs(mean - expected) / expected))}
    witness = {}
    for name in sorted(PRESETS):
        c = preset(name)
        mode = c.spec.kind
        allowed = None
        if mode == "large_r":
            allowed = c.graph.part_b[: 2 * args.witness_m]
        v = sparse_witness_check(c.graph, args.witness_m, c.spec.r, mode, allowed)
        witness[name] = {"status": v.status, "value": v.value, "nodes": v.nodes}
    out["witness"] = witness
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
