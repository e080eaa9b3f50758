import math
from fractions import Fraction

import numpy as np
import pytest

from regulus.config import DEFAULT
from regulus.errors import PreconditionError, RouteFailure
from regulus.generators import gnp, random_bipartite, random_regular_bipartite, random_tree
from regulus.graph import BipartiteGraph, Graph, is_subgraph_of
from regulus.oracle import find_regular_subgraph_exact, is_r_regular
from regulus.pipeline import (AlmostBiregularDescriptor, case1_route, case2_route,
                              class_thresholds, classify_cases, erdos_sauer, jsr_substitute,
                              loglog, truncate_b_degrees)

CASE2_CFG = DEFAULT.replace(es_t0_scale=0.25)


def b_regular(n_a, n_b, D, rng, skew=False):
    """Bipartite graph where every B-vertex has exactly D random A-neighbors."""
    w = None
    if skew:
        w = 2.0 ** -np.arange(n_a) / 4 + 1
        w /= w.sum()
    edges = [(int(a), n_a + j) for j in range(n_b)
             for a in rng.choice(n_a, D, replace=False, p=w)]
    return BipartiteGraph.from_parts(n_a, n_b, edges)


class TestThresholds:
    @pytest.mark.parametrize("n,r", [(10, 1), (100, 2), (10 ** 4, 3), (10 ** 6, 5)])
    def test_arithmetic(self, n, r):
        ts = class_thresholds(n, r)
        ell = len(ts) - 1
        assert ts[-1] >= math.log2(n)
        assert ell == 0 or ts[-2] < math.log2(n)
        assert ell <= 6 * r * loglog(n)
        for i, t in enumerate(ts):
            assert t == pytest.approx(ts[0] * (1 + 1 / (3 * r)) ** i)

    def test_loglog_floor(self):
        assert loglog(2) == 1.0 and loglog(2 ** 16) == 4.0


class TestClassify:
    def test_all_low_is_case1(self, rng):
        h = b_regular(30, 60, 4, rng)
        tr = classify_cases(h, 2, DEFAULT, n=10 ** 6)
        assert tr.case == 1 and len(tr.b_prime) == 60
        assert tr.classes[0] == tuple(h.part_a.tolist())

    def test_all_high_is_case2(self):
        # A-degrees 5 with t0 = 2 -> class 1 = (4, 2^t1]
        h = BipartiteGraph.complete(3, 5)
        cfg = DEFAULT.replace(es_t0_scale=1.0)
        tr = classify_cases(h, 1, cfg, n=16)
        assert tr.ts[0] == 2.0
        assert tr.case == 2 and tr.index == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_recount(self, seed):
        rng = np.random.default_rng(seed)
        h = b_regular(40, 400, 6, rng, skew=True)
        tr = classify_cases(h, 2, CASE2_CFG, n=440)
        a0 = set(tr.classes[0])
        q1 = [v for v in h.part_b.tolist() if 2 * sum(u in a0 for u in h.neighbors(v)) >= 6]
        assert tr.case1_holds == (2 * len(q1) >= len(h.part_b))
        if tr.case == 1:
            assert sorted(tr.b_prime) == q1
        else:
            ai = set(tr.classes[tr.index])
            q2 = [v for v in h.part_b.tolist() if sum(u in ai for u in h.neighbors(v)) >= 2]
            assert sorted(tr.b_prime) == q2

    def test_requires_equal_b_degrees(self):
        h = BipartiteGraph.from_parts(2, 2, [(0, 2), (1, 2), (0, 3)])
        with pytest.raises(PreconditionError):
            classify_cases(h, 1)


class TestDescriptor:
    def test_regular_biregular(self, rng):
        h = random_regular_bipartite(20, 5, rng)
        desc = AlmostBiregularDescriptor.of(h, 1)
        assert desc.violations(h) == []

    def test_detects_violations(self):
        # A-degrees 2, 1 and d = 3/2
        h = BipartiteGraph.from_parts(2, 3, [(0, 2), (0, 3), (1, 4)])
        desc = AlmostBiregularDescriptor.of(h, Fraction(4, 3))
        assert desc.violations(h) == []
        assert AlmostBiregularDescriptor(1.0, 1, desc.d).violations(h) == \
            ["some A-degree exceeds L d"]


class TestJSR:
    def test_regular_input_is_itself(self, rng):
        h = random_regular_bipartite(20, 6, rng)
        out = jsr_substitute(h, AlmostBiregularDescriptor.of(h, 8))
        assert out.max_degree == out.min_degree == 6 and out.m == h.m

    def test_two_classes(self, rng):
        # A-degrees 4 and 16; B-degrees 4
        a_low, a_high, nb = 40, 10, 80
        edges = []
        for j in range(nb):
            picks = rng.choice(a_low, 2, replace=False).tolist() + \
                (a_low + rng.choice(a_high, 2, replace=False)).tolist()
            edges += [(int(a), a_low + a_high + j) for a in picks]
        h = BipartiteGraph.from_parts(a_low + a_high, nb, edges)
        desc = AlmostBiregularDescriptor.of(h, 64)
        out = jsr_substitute(h, desc)
        assert out.max_degree <= 64 * out.min_degree
        assert float(out.average_degree) >= 4 / (16 * math.log2(64))
        assert is_subgraph_of(out, h.graph)

    def test_rejects_non_biregular(self):
        h = BipartiteGraph.from_parts(2, 2, [(0, 2), (1, 2), (0, 3)])
        with pytest.raises(PreconditionError):
            jsr_substitute(h, AlmostBiregularDescriptor(4.0, 2, 1))


class TestRoutes:
    @pytest.mark.parametrize("seed", range(3))
    def test_case1(self, seed):
        rng = np.random.default_rng(seed)
        h = b_regular(60, 300, 12, rng)
        tr = classify_cases(h, 2, DEFAULT, n=360)
        assert tr.case == 1
        out = case1_route(tr, DEFAULT, rng)
        assert is_r_regular(out, 2) and is_subgraph_of(out, h.graph)
        assert AlmostBiregularDescriptor.of(tr.h_prime, 2 ** tr.t0).violations(tr.h_prime) == []

    @pytest.mark.parametrize("seed", range(3))
    def test_case2(self, seed):
        rng = np.random.default_rng(seed)
        h = truncate_b_degrees(random_bipartite(12, 200, 0.8, rng), 4, rng)
        tr = classify_cases(h, 3, CASE2_CFG, n=212)
        if tr.case != 2:
            tr.case, tr.index = 2, tr.case2_index
            ai = set(tr.classes[tr.index])
            tr.b_prime = tuple(v for v in h.part_b.tolist()
                               if sum(u in ai for u in h.neighbors(v)) >= 3)
        out = case2_route(tr, 3, CASE2_CFG, rng)
        assert is_r_regular(out, 3) and is_subgraph_of(out, h.graph)
        assert (tr.h_prime.degrees[tr.h_prime.part_b] == 3).all()

    def test_case_checks(self, rng):
        h = b_regular(30, 60, 4, rng)
        tr = classify_cases(h, 2, DEFAULT, n=10 ** 6)
        with pytest.raises(PreconditionError):
            case2_route(tr, 2)


class TestErdosSauer:
    def test_k88(self, rng):
        g = BipartiteGraph.complete(8, 8).graph
        out = erdos_sauer(g, 3, DEFAULT, rng)
        assert is_r_regular(out, 3) and is_subgraph_of(out, g)

    def test_forest_fails(self, rng):
        forest = random_tree(40, rng).restrict(None, np.arange(39) % 5 != 0)
        with pytest.raises(RouteFailure) as exc:
            erdos_sauer(forest, 2, DEFAULT, rng)
        assert "events" in exc.value.details or "failures" in exc.value.details

    def test_edgeless(self, rng):
        with pytest.raises(RouteFailure):
            erdos_sauer(Graph(5), 2, DEFAULT, rng)

    @pytest.mark.parametrize("n,p,r", [(200, 0.1, 3), (500, 0.05, 3), (100, 0.3, 4)])
    def test_dense_random(self, n, p, r):
        # small analogue confirmed by the oracle
        assert find_regular_subgraph_exact(gnp(14, 0.6, np.random.default_rng(0)), r).found
        for seed in range(3):
            rng = np.random.default_rng(seed)
            g = gnp(n, p, rng)
            trace = []
            out = erdos_sauer(g, r, DEFAULT, rng, trace)
            assert is_r_regular(out, r) and is_subgraph_of(out, g)
            assert any(ev.get("stage") == "classify" for ev in trace)
