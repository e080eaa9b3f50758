from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import brute
from conftest import graphs
from regulus.errors import PreconditionError, SearchBudgetExceeded
from regulus.generators import complete, cycle, gnp, petersen, random_tree, star
from regulus.graph import BipartiteGraph, Graph, is_subgraph_of
from regulus.oracle import (FOUND, INDETERMINATE, NONE, SearchBudget, afk_condition, choose_q,
                            find_regular_subgraph_exact, is_prime_power, is_r_regular,
                            max_regular_degree, regular_factor_peel)


class TestIsRRegular:
    def test_examples(self):
        assert is_r_regular(cycle(5), 2)
        assert not is_r_regular(cycle(5), 3)
        assert not is_r_regular(Graph(4), 2)
        assert not is_r_regular(Graph(0), 0)


class TestExactSearch:
    def test_k4(self):
        res = find_regular_subgraph_exact(complete(4), 3)
        assert res.status == FOUND and res.graph.m == 6
        tri = find_regular_subgraph_exact(complete(4), 2)
        assert tri.found and is_r_regular(tri.graph, 2) and tri.graph.m in (3, 4)

    @pytest.mark.parametrize("seed", range(5))
    def test_tree_has_no_cycle(self, seed):
        t = random_tree(15, np.random.default_rng(seed))
        assert find_regular_subgraph_exact(t, 2).status == NONE

    def test_budget_gives_indeterminate(self):
        g = gnp(40, 0.15, np.random.default_rng(3))
        res = find_regular_subgraph_exact(g, 5, SearchBudget(node_limit=1))
        assert res.status in (INDETERMINATE, FOUND, NONE)
        if res.status == INDETERMINATE:
            assert res.graph is None

    def test_budget_validation(self):
        with pytest.raises(PreconditionError):
            SearchBudget(0)

    @given(graphs(max_n=9, max_m=16), st.integers(1, 4))
    def test_agrees_with_two_exhaustive_orders(self, g, r):
        res = find_regular_subgraph_exact(g, r, SearchBudget(10 ** 6))
        assert res.status != INDETERMINATE
        expected = brute.has_r_regular_subgraph(g.n, g.edge_list(), r)
        assert expected == brute.has_r_regular_by_vertex_sets(g.n, g.edge_list(), r)
        assert res.found == expected
        if res.found:
            assert is_r_regular(res.graph, r) and is_subgraph_of(res.graph, g)

    def test_deterministic(self):
        g = gnp(14, 0.5, np.random.default_rng(1))
        a = find_regular_subgraph_exact(g, 3)
        b = find_regular_subgraph_exact(g, 3)
        assert a.graph.root_edges() == b.graph.root_edges()


class TestMaxRegularDegree:
    def test_examples(self):
        assert max_regular_degree(petersen()) == 3
        assert max_regular_degree(star(5)) == 1
        assert max_regular_degree(Graph(3)) == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_gnp10_matches_exhaustive(self, seed):
        g = gnp(10, 0.5, np.random.default_rng(seed))
        expect = max((r for r in range(1, g.max_degree + 1)
                      if brute.has_r_regular_by_vertex_sets(g.n, g.edge_list(), r)), default=0)
        assert max_regular_degree(g) == expect

    def test_tiny_budget_is_never_wrong(self):
        g = gnp(14, 0.4, np.random.default_rng(0))
        full = max_regular_degree(g)
        try:
            assert max_regular_degree(g, SearchBudget(node_limit=1)) == full
        except SearchBudgetExceeded:
            pass


class TestFactorPeel:
    def test_kaa(self):
        out = regular_factor_peel(BipartiteGraph.complete(4, 5), 3)
        assert out is not None and is_r_regular(out, 3)

    def test_star_has_no_2_factor(self):
        assert regular_factor_peel(BipartiteGraph.complete(1, 5), 2) is None


class TestAFK:
    def test_k4(self):
        assert afk_condition(2, 2, 3, 3)
        assert find_regular_subgraph_exact(complete(4), 2).found

    def test_c4_boundary(self):
        assert not afk_condition(2, 2, 2, 2)

    def test_parity(self):
        v = afk_condition(3, 2, 100, 100)
        assert not v and "parity" in v.reason

    def test_non_prime_power(self):
        assert not afk_condition(6, 2, 100, 100)

    def test_prime_powers(self):
        assert [q for q in range(1, 30) if is_prime_power(q)] == \
            [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]


class TestChooseQ:
    def test_examples(self):
        assert choose_q(40, 1) == 4
        assert choose_q(10, 1) == 1

    def test_too_small(self):
        with pytest.raises(PreconditionError):
            choose_q(9, 1)

    @given(st.fractions(min_value=10, max_value=10 ** 6),
           st.fractions(min_value=1, max_value=100))
    def test_interval(self, d, lam):
        if d / (10 * lam) < 1:
            return
        q = choose_q(d, lam)
        assert q & (q - 1) == 0
        assert Fraction(d) / (10 * lam) <= q < Fraction(d) / (5 * lam)
