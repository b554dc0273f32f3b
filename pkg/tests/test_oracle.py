import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overlapcomm import Graph, is_alpha_epsilon_set
from overlapcomm.errors import BudgetExceededError
from overlapcomm.graph import common_neighbor_count
from overlapcomm.oracle import (count_length2_paths_matrix, enumerate_alpha_epsilon_sets,
                                enumerate_maximal_cliques)

from conftest import complete, cycle, gnp, star


class TestMaximalCliques:
    def test_k5(self):
        assert enumerate_maximal_cliques(complete(5)) == [(0, 1, 2, 3, 4)]

    def test_c5(self):
        assert enumerate_maximal_cliques(cycle(5), 2) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]

    def test_shared_edge(self):
        edges = list(itertools.combinations([0, 1, 2, 3], 2)) + \
            list(itertools.combinations([2, 3, 4, 5], 2))
        g = Graph.from_edges(6, edges)
        assert enumerate_maximal_cliques(g, 2) == [(0, 1, 2, 3), (2, 3, 4, 5)]

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            enumerate_maximal_cliques(gnp(40, 0.5, 0), budget=5)


class TestAlphaSets:
    def test_isolated_k4(self):
        assert enumerate_alpha_epsilon_sets(complete(4), 1, 0.5, 3) == [(0, 1, 2, 3)]

    def test_edgeless(self):
        assert enumerate_alpha_epsilon_sets(Graph.from_edges(6, []), 0.6, 0.2, 2) == []

    def test_closed_under_checker(self):
        for seed in range(50):
            g = gnp(10, 0.4, seed)
            for s in enumerate_alpha_epsilon_sets(g, 0.7, 0.3, 2):
                assert is_alpha_epsilon_set(g, s, 0.7, 0.3)

    def test_size_limit(self):
        with pytest.raises(BudgetExceededError):
            enumerate_alpha_epsilon_sets(Graph.from_edges(21, []), 1, 0)


class TestPaths2:
    def test_triangle(self):
        m = count_length2_paths_matrix(complete(3))
        assert (m[~np.eye(3, dtype=bool)] == 1).all()

    def test_star(self):
        m = count_length2_paths_matrix(star(6))
        assert m[1, 2] == 1 and m[0, 3] == 0

    def test_matches_graph_core(self):
        for seed in range(50):
            g = gnp(50, 0.2, seed)
            m = count_length2_paths_matrix(g)
            for u in range(g.n):
                for v in range(u + 1, g.n):
                    assert m[u, v] == common_neighbor_count(g, u, v)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 9), st.floats(0.1, 0.9))
def test_alpha_sets_complete(seed, n, p):
    g = gnp(n, p, seed)
    listed = set(enumerate_alpha_epsilon_sets(g, 0.6, 0.3, 1))
    for size in range(1, n + 1):
        for s in itertools.combinations(range(n), size):
            assert (s in listed) == is_alpha_epsilon_set(g, s, 0.6, 0.3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 25), st.floats(0.05, 0.9))
def test_maximal_cliques_structure(seed, n, p):
    g = gnp(n, p, seed)
    cliques = enumerate_maximal_cliques(g)
    adj = g.adj_sets()
    sets = [set(c) for c in cliques]
    for c in cliques:
        assert all(v in adj[u] for u, v in itertools.combinations(c, 2))
        common = set(range(n))
        for u in c:
            common &= adj[u]
        assert not common
    for a, b in itertools.permutations(sets, 2):
        assert not a < b
    covered = set().union(*sets) if sets else set()
    assert covered == set(range(n))
