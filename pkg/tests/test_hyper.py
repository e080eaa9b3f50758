import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import brute
from regulus.config import DEFAULT
from regulus.errors import PreconditionError, SearchBudgetExceeded
from regulus.generators import random_regular_bipartite
from regulus.graph import BipartiteGraph
from regulus.hyper import (MultiHypergraph, bipartite_to_hyper, enumerate_matchings,
                           find_sunflower, hyper_to_bipartite_regular,
                           is_regular_hypergraph, matching_count_bound, rao_threshold,
                           regular_subhypergraph)
from regulus.oracle import is_r_regular

K3 = MultiHypergraph(2, 3, [(0, 1), (0, 2), (1, 2)])
K4 = MultiHypergraph(2, 4, list(itertools.combinations(range(4), 2)))


@st.composite
def hypergraphs(draw, max_r=3, max_n=8, max_m=10):
    r = draw(st.integers(1, max_r))
    n = draw(st.integers(r, max_n))
    subsets = list(itertools.combinations(range(n), r))
    edges = draw(st.lists(st.sampled_from(subsets), min_size=1, max_size=max_m))
    return MultiHypergraph(r, n, edges)


class TestMultiHypergraph:
    def test_validation(self):
        with pytest.raises(PreconditionError):
            MultiHypergraph(2, 3, [(0, 0)])
        with pytest.raises(PreconditionError):
            MultiHypergraph(2, 3, [(0, 3)])

    def test_multi_edges_and_degrees(self):
        hg = MultiHypergraph(2, 3, [(0, 1), (1, 0), (1, 2)])
        assert hg.degrees.tolist() == [2, 3, 1]
        assert hg.average_degree == Fraction(2)


class TestEnumerateMatchings:
    def test_examples(self):
        assert len(enumerate_matchings(K3, 1)) == 3
        assert len(enumerate_matchings(K4, 2)) == 3
        hg = MultiHypergraph(3, 7, [(1, 2, 3), (4, 5, 6)])
        assert [m.edge_ids for m in enumerate_matchings(hg, 2)] == [(0, 1)]

    def test_cap(self):
        assert len(enumerate_matchings(K4, 1, cap=2)) == 2

    @given(hypergraphs(), st.integers(1, 3))
    def test_count_matches_brute_force(self, hg, t):
        ms = enumerate_matchings(hg, t)
        assert len(ms) == brute.count_matchings(hg.edges, t)
        assert all(m.is_valid_in(hg) and len(m) == t for m in ms)


class TestMatchingCountBound:
    def test_examples(self):
        hg6 = MultiHypergraph(2, 12, [(2 * i, 2 * i + 1) for i in range(6)])
        assert matching_count_bound(hg6, 1, 1)[0] == 3
        hg8 = MultiHypergraph(2, 16, [(2 * i, 2 * i + 1) for i in range(8)])
        assert matching_count_bound(hg8, 2, 1)[0] == 4

    def test_flag(self):
        _, flag = matching_count_bound(K4, 1, Fraction(1))
        assert flag  # 1 <= 4/8 + 1

    def test_rejects_degree_violation(self):
        star = MultiHypergraph(2, 4, [(0, 1), (0, 2), (0, 3)])
        with pytest.raises(PreconditionError):
            matching_count_bound(star, 1, 1)

    @given(hypergraphs(max_n=10, max_m=12), st.integers(1, 3))
    def test_bound_holds_when_flag(self, hg, t):
        mu = Fraction(hg.max_degree) / hg.average_degree
        bound, flag = matching_count_bound(hg, t, mu)
        if flag:
            assert brute.count_matchings(hg.edges, t) >= bound


class TestRao:
    def test_t1(self):
        assert rao_threshold(1, 4, 2) == pytest.approx(2 * 4 * 2)

    def test_monotone(self):
        grid = [(t, r, a) for t in range(1, 5) for r in range(2, 5) for a in (1, 2, 3)]
        for t, r, a in grid:
            v = rao_threshold(t, r, a)
            assert rao_threshold(t + 1, r, a) >= v
            assert rao_threshold(t, r + 1, a) >= v
            assert rao_threshold(t, r, a + 1) >= v

    @pytest.mark.parametrize("t,r,alpha", [(1, 2, 2), (3, 3, 1.5), (5, 4, 2), (8, 2, 3)])
    def test_arbitrary_precision(self, t, r, alpha):
        exact = brute.rao_threshold_exact(t, r, alpha)
        assert rao_threshold(t, r, alpha) == pytest.approx(float(exact), rel=1e-12)


class TestFindSunflower:
    def test_common_core(self):
        sf = find_sunflower([{1, 2}, {1, 3}, {1, 4}], 3)
        assert sf.core == frozenset({1}) and sf.is_valid()

    def test_disjoint(self):
        sf = find_sunflower([{1, 2}, {3, 4}, {5, 6}], 3)
        assert sf.core == frozenset() and sf.is_valid()

    def test_triangle_has_none(self):
        assert find_sunflower([{1, 2}, {2, 3}, {1, 3}], 3) is None

    def test_budget(self):
        fam = [set(c) for c in itertools.combinations(range(9), 3)]
        with pytest.raises(SearchBudgetExceeded):
            find_sunflower(fam, 5, budget=1)

    def test_mixed_sizes_rejected(self):
        with pytest.raises(PreconditionError):
            find_sunflower([{1}, {1, 2}], 2)

    @given(st.integers(1, 4), st.integers(2, 4), st.data())
    def test_agrees_with_exhaustive(self, size, r, data):
        ground = list(itertools.combinations(range(size + 4), size))
        fam = data.draw(st.lists(st.sampled_from(ground), max_size=8, unique=True))
        got = find_sunflower(fam, r)
        assert (got is not None) == brute.has_sunflower(fam, r)
        if got is not None:
            assert got.is_valid() and len(got.petals) == r
            assert all(tuple(sorted(p)) in fam for p in got.petals)


class TestRegularSubhypergraph:
    def test_k4_three_regular(self):
        sub = regular_subhypergraph(K4, 3)
        assert sub.m == 6 and is_regular_hypergraph(sub, 3)

    def test_union_of_matchings_returns_itself(self):
        # 3-regular 2-uniform: union of three disjoint perfect matchings of K_{3,3}
        edges = [(i, 3 + (i + k) % 3) for k in range(3) for i in range(3)]
        hg = MultiHypergraph(2, 6, edges)
        sub = regular_subhypergraph(hg, 3)
        assert sorted(sub.edges) == sorted(hg.edges)

    def test_three_uniform_instance(self, rng):
        # 3-uniform: 6 random perfect matchings on 12 vertices
        edges = []
        for _ in range(6):
            p = rng.permutation(12)
            edges += [tuple(p[3 * i:3 * i + 3]) for i in range(4)]
        hg = MultiHypergraph(3, 12, edges)
        sub = regular_subhypergraph(hg, 3, DEFAULT, rng)
        assert sub is not None and is_regular_hypergraph(sub, 3)

    def test_none_when_impossible(self):
        hg = MultiHypergraph(2, 3, [(0, 1), (1, 2)])
        assert regular_subhypergraph(hg, 2) is None


class TestBipartiteReduction:
    def test_single_edge(self):
        h = BipartiteGraph.complete(3, 1)
        hg = bipartite_to_hyper(h, 3)
        assert hg.edges == ((0, 1, 2),)

    def test_multi_edge(self):
        h = BipartiteGraph.from_parts(2, 2, [(0, 2), (1, 2), (0, 3), (1, 3)])
        hg = bipartite_to_hyper(h, 2)
        assert hg.edges == ((0, 1), (0, 1))

    def test_rejects_degree_violation(self):
        h = BipartiteGraph.from_parts(2, 2, [(0, 2), (1, 2), (0, 3)])
        with pytest.raises(PreconditionError):
            bipartite_to_hyper(h, 2)

    @pytest.mark.parametrize("seed", range(3))
    def test_average_degree(self, seed):
        rng = np.random.default_rng(seed)
        h = random_regular_bipartite(10, 3, rng)
        hg = bipartite_to_hyper(h, 3)
        assert hg.average_degree == Fraction(h.m, len(h.part_a))

    def test_identity_round_trip(self, rng):
        h = random_regular_bipartite(6, 3, rng)
        hg = bipartite_to_hyper(h, 3)
        back = hyper_to_bipartite_regular(hg, h)
        assert back.graph.root_edges() == h.graph.root_edges()

    def test_sunflower_round_trip(self, rng):
        # three edge-disjoint perfect matchings of a 3-uniform hypergraph plus one extra edge
        hedges = [(0, 1, 2), (3, 4, 5), (0, 1, 3), (2, 4, 5), (0, 1, 4), (2, 3, 5), (0, 1, 5)]
        h = BipartiteGraph.from_parts(6, len(hedges),
                                      [(a, 6 + j) for j, e in enumerate(hedges) for a in e])
        hg = bipartite_to_hyper(h, 3)
        sub = regular_subhypergraph(hg, 3, DEFAULT, rng)
        assert sub is not None and sub.m == 6
        back = hyper_to_bipartite_regular(sub, h)
        assert is_r_regular(back, 3)
        assert back.graph.root_edges() <= h.graph.root_edges()

    def test_provenance_mismatch(self):
        h = BipartiteGraph.complete(2, 2)
        hg = MultiHypergraph(2, 2, [(0, 1)], vertex_labels=[0, 1], edge_labels=[0])
        with pytest.raises(PreconditionError):
            hyper_to_bipartite_regular(hg, h)
