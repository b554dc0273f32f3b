import itertools
from fractions import Fraction

import numpy as np
import pytest

from overlapcomm import Graph, GroundTruth, ModelParams, generate, validate
from overlapcomm.validator import (check_distinctness, check_gamma, check_gamma_prime, check_gap,
                                   check_overlap_and_sizes, check_regularity_empirical,
                                   duck_audit)

from conftest import complete, disjoint_union


def truth_of(*comms, model="clique"):
    comms = [tuple(sorted(c)) for c in comms]
    return GroundTruth(comms, [np.ones(len(c)) for c in comms], model)


def clique_edges(nodes):
    return list(itertools.combinations(sorted(nodes), 2))


class TestGap:
    def test_isolated_k10(self):
        assert check_gap(complete(10), truth_of(range(10)), ModelParams(n=10, k=10, epsilon=0.3)).passed

    def test_outsider_with_nine(self):
        g = Graph.from_edges(11, clique_edges(range(10)) + [(i, 10) for i in range(9)])
        res = check_gap(g, truth_of(range(10)), ModelParams(n=11, k=10, epsilon=0.3))
        assert not res.passed
        assert res.witnesses == [{"node": 10, "community": 0, "fraction": Fraction(9, 10)}]

    def test_boundary_is_failure(self):
        # fraction exactly alpha - eps = 0.7 violates "less than"
        g = Graph.from_edges(11, clique_edges(range(10)) + [(i, 10) for i in range(7)])
        assert not check_gap(g, truth_of(range(10)), ModelParams(n=11, k=10, epsilon=0.3)).passed
        g = Graph.from_edges(11, clique_edges(range(10)) + [(i, 10) for i in range(6)])
        assert check_gap(g, truth_of(range(10)), ModelParams(n=11, k=10, epsilon=0.3)).passed

    def test_repairing_witnesses_flips(self):
        g, truth, _ = generate(ModelParams(n=100, k=40, epsilon=0.4, gamma=0.5, stress_nodes=3),
                               "clique", "gap-stress", 7)
        p = ModelParams(n=100, k=40, epsilon=0.4)
        bad = {w["node"] for w in check_gap(g, truth, p).witnesses}
        kept = [(u, v) for u, v in g.edges().tolist() if u not in bad and v not in bad]
        assert check_gap(Graph.from_edges(100, kept), truth, p).passed


class TestGamma:
    def test_no_ambient(self):
        g, truth, _ = generate(ModelParams(n=60, k=20, num_communities=2), "clique", "none", 0)
        res = check_gamma(g, truth, ModelParams(n=60, k=20, gamma=1.0))
        assert res.passed and res.margin == 0

    def test_three_community_seven_ambient(self):
        # node 0: community {0,1,2,3}, ambient edges to 4..10
        edges = clique_edges(range(4)) + [(0, j) for j in range(4, 11)]
        res = check_gamma(Graph.from_edges(11, edges), truth_of(range(4)),
                          ModelParams(n=11, k=4, gamma=0.5))
        assert not res.passed
        assert res.witnesses == [{"node": 0, "fraction": Fraction(3, 10)}]


class TestGammaPrime:
    def _instance(self, ambient):
        # community of 10, node 0 with `ambient` edges to outsiders
        n = 10 + ambient
        edges = clique_edges(range(10)) + [(0, 10 + j) for j in range(ambient)]
        return Graph.from_edges(n, edges), truth_of(range(10))

    def test_zero_ambient(self):
        g, t = self._instance(0)
        assert check_gamma_prime(g, t, ModelParams(n=10, k=10, gamma=0.5, d=2)).passed

    def test_boundary_passes(self):
        g, t = self._instance(40)
        res = check_gamma_prime(g, t, ModelParams(n=50, k=10, gamma=0.5, d=2))
        assert res.passed and res.margin == 0

    def test_fails_above(self):
        g, t = self._instance(44)
        res = check_gamma_prime(g, t, ModelParams(n=54, k=10, gamma=0.5, d=2))
        assert not res.passed and res.witnesses[0]["required"] == 11


class TestDistinctness:
    def test_d1(self):
        g, truth, _ = generate(ModelParams(n=90, k=30, num_communities=3), "clique", "none", 1)
        assert check_distinctness(g, truth, ModelParams(beta=1.0)).passed

    def test_equal_sets(self):
        t = truth_of(range(5), range(5))
        res = check_distinctness(complete(5), t, ModelParams(beta=0.1))
        assert not res.passed and res.witnesses

    def test_not_applicable_without_beta(self):
        res = check_distinctness(complete(5), truth_of(range(5)), ModelParams())
        assert res.passed and not res.applicable


class TestOverlapSizes:
    def test_generator_output(self):
        p = ModelParams(n=200, k=40, d=2, delta=0.5, num_communities=6)
        for seed in range(10):
            _, truth, _ = generate(p, "clique", "none", seed)
            assert check_overlap_and_sizes(truth, p).passed

    def test_too_many_memberships(self):
        t = truth_of((0, 1, 2), (0, 3, 4), (0, 5, 6))
        res = check_overlap_and_sizes(t, ModelParams(n=7, k=3, d=2))
        assert not res.passed and res.witnesses[0] == {"kind": "overlap", "node": 0, "memberships": 3}

    def test_sparse_intersection(self):
        # k=400, d=2: limit 5, so 6 shared nodes fail
        a = tuple(range(400))
        b = tuple(range(394, 794))
        res = check_overlap_and_sizes(truth_of(a, b, model="sparse"), ModelParams(n=800, k=400, d=2))
        assert not res.passed and res.witnesses[0]["kind"] == "intersection"
        b = tuple(range(395, 795))
        assert check_overlap_and_sizes(truth_of(a, b, model="sparse"), ModelParams(n=800, k=400, d=2)).passed


class TestRegularity:
    def test_clique(self):
        assert check_regularity_empirical(complete(8), truth_of(range(8)), ModelParams(epsilon=0.1)).passed

    def test_two_k10_as_one(self):
        g = disjoint_union(complete(10), complete(10))
        res = check_regularity_empirical(g, truth_of(range(20)), ModelParams(epsilon=0.3))
        assert not res.passed
        assert any(w["kind"] == "common" and w["common"] == 0 for w in res.witnesses)

    def test_expected_degree_community(self):
        p = ModelParams(n=200, k=200, alpha=0.7, epsilon=0.3)
        ok = sum(check_regularity_empirical(*generate(p, "dense", "none", s)[:2], p).passed
                 for s in range(100))
        assert ok >= 90


class TestValidate:
    def test_report_shape(self):
        g, truth, _ = generate(ModelParams(n=40, k=10, epsilon=0.3, gamma=0.5, beta=0.1), "clique", "none", 0)
        rep = validate(g, truth, ModelParams(n=40, k=10, epsilon=0.3, gamma=0.5, beta=0.1))
        d = rep.to_json_dict()
        assert rep.passed and set(d["checks"]) >= {"gap", "gamma", "gamma_prime", "distinctness",
                                                    "overlap_and_sizes", "regularity"}

    def test_failures_carry_witnesses(self):
        g = Graph.from_edges(11, clique_edges(range(10)) + [(i, 10) for i in range(9)])
        rep = validate(g, truth_of(range(10)), ModelParams(n=11, k=10, epsilon=0.3, gamma=0.5))
        assert rep.failed() == ["gap"]
        for name in rep.failed():
            assert rep.checks[name].witnesses

    def test_duck_audit(self):
        g = disjoint_union(complete(5), complete(4))
        t = truth_of(range(5))
        res = duck_audit(g, t, ModelParams(epsilon=0.5))
        assert not res.passed and {"set": [5, 6, 7, 8]} in res.witnesses
        assert duck_audit(g, truth_of(range(5), range(5, 9)), ModelParams(epsilon=0.5)).passed

    def test_deterministic(self):
        g, truth, _ = generate(ModelParams(n=100, k=30, alpha=0.7, epsilon=0.3, gamma=0.5), "dense",
                               "uniform", 3)
        p = ModelParams(n=100, k=30, alpha=0.7, epsilon=0.3, gamma=0.5)
        assert validate(g, truth, p).to_json_dict() == validate(g, truth, p).to_json_dict()
