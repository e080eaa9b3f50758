"""Acceptance rate of the certified one-step contraction as eps*d shrinks.

Draws one step on random d-regular bipartite graphs for a range of eps
and records how many attempts each certified draw needed. The theory
only promises high acceptance for very large eps*d, so this is measured,
not asserted.

    python scripts/lasvegas_rates.py --half 300 --degrees 20,40,80 --trials 20
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from regulus.config import DEFAULT
from regulus.errors import LasVegasFailure
from regulus.generators import random_regular_bipartite
from regulus.nearreg import CorrectedGraph, one_step


@dataclass
class RateRow:
    d: int
    eps: float
    eps_d: float
    trials: int
    accepted: int
    mean_attempts: float


def measure(half: int, d: int, eps: Fraction, trials: int, budget: int, seed: int) -> RateRow:
    rng = np.random.default_rng(seed)
    h = random_regular_bipartite(half, d, rng)
    cg = CorrectedGraph.plain(h.graph)
    cfg = DEFAULT.replace(eps_d_floor=1e-9)
    delta = (1 + 10 * eps) * d
    attempts = []
    for _ in range(trials):
        stats = {}
        try:
            one_step(cg, eps, d, delta, rng, budget, cfg, stats)
            attempts.append(stats["attempts"])
        except LasVegasFailure:
            pass
    mean = float(np.mean(attempts)) if attempts else float("nan")
    return RateRow(d, float(eps), float(eps * d), trials, len(attempts), mean)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--half", type=int, default=300)
    ap.add_argument("--degrees", default="20,40,80")
    ap.add_argument("--eps", default="1/100,1/200,1/400")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--budget", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    writer = csv.DictWriter(sys.stdout, fieldnames=list(RateRow.__dataclass_fields__),
                            lineterminator="\n")
    writer.writeheader()
    for d in (int(x) for x in args.degrees.split(",")):
        for eps in (Fraction(x) for x in args.eps.split(",")):
            row = measure(args.half, d, eps, args.trials, args.budget, args.seed)
            writer.writerow(row.__dict__)
    return 0


if __name__ == "__main__":
    sys.exit(main())
