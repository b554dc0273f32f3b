import math
from itertools import combinations

import numpy as np
import pytest

from overlapcomm import AmbientSpec, ModelParams, generate, io, validate
from overlapcomm.errors import GenerationInfeasibleError, InvalidParamsError
from overlapcomm.generator import edge_probabilities, plant_memberships
from overlapcomm.graph import RngStream
from overlapcomm.oracle import enumerate_maximal_cliques
from overlapcomm.validator import check_gap

CONFIGS = __import__("pathlib").Path(__file__).resolve().parent.parent / "configs"


def _internal_edges(g, members):
    s = set(members)
    return sum(1 for u, v in g.edges().tolist() if u in s and v in s)


class TestPlanting:
    def test_single_community_exact_size(self):
        p = ModelParams(n=100, k=40, delta=1)
        comms = plant_memberships(p, "clique", RngStream(0))
        assert len(comms) == 1 and len(comms[0]) == 40

    def test_d1_disjoint(self):
        p = ModelParams(n=300, k=40, delta=0.5, num_communities=6)
        for seed in range(20):
            comms = plant_memberships(p, "clique", RngStream(seed))
            for a, b in combinations(comms, 2):
                assert not set(a) & set(b)

    def test_sparse_intersection_bound(self):
        # k=400, d=2 gives the bound k/(20 d^2) = 5
        p = ModelParams(n=40000, k=400, d=2, b=12, num_communities=3)
        for seed in range(100):
            comms = plant_memberships(p, "sparse", RngStream(seed))
            assert max(len(set(a) & set(b)) for a, b in combinations(comms, 2)) <= 5

    def test_size_bands(self):
        sim = ModelParams(n=2000, k=50, delta=0.6, num_communities=20)
        for c in plant_memberships(sim, "clique", RngStream(1)):
            assert 30 <= len(c) <= 50
        anys = ModelParams(n=2000, k=64, m=8, num_communities=20)
        for c in plant_memberships(anys, "anysize-clique", RngStream(1)):
            assert 8 <= len(c) <= 64

    def test_overlap_chain(self):
        p = ModelParams(n=200, k=30, d=2, num_communities=3, overlap=5)
        a, b, c = plant_memberships(p, "clique", RngStream(3))
        assert len(set(a) & set(b)) == 5 and len(set(b) & set(c)) == 5

    def test_infeasible_demand(self):
        with pytest.raises(GenerationInfeasibleError):
            plant_memberships(ModelParams(n=50, k=40, num_communities=2), "clique", RngStream(0))

    @pytest.mark.parametrize("kw,model", [
        (dict(n=100, k=50, b=10), "sparse"),
        (dict(n=100, k=50, b=11), "sparse"),
        (dict(n=100, k=20, alpha=0.5, epsilon=0.6), "dense"),
        (dict(n=100, k=20, delta=0), "clique"),
    ])
    def test_invalid(self, kw, model):
        with pytest.raises(InvalidParamsError):
            generate(ModelParams(**kw), model)


class TestRealize:
    def test_affinity_one_gives_cliques(self):
        p = ModelParams(n=120, k=30, delta=0.5, num_communities=3, d=1)
        g, truth, _ = generate(p, "clique", "none", 4)
        cliques = set(enumerate_maximal_cliques(g, 2))
        for c in truth.communities:
            assert c in cliques

    def test_density_sqrt_alpha(self):
        # internal density of a 200-node community with p_u = sqrt(0.6)
        p = ModelParams(n=200, k=200, alpha=0.6)
        pairs = math.comb(200, 2)
        dens = [_internal_edges(g, t.communities[0]) / pairs
                for g, t, _ in (generate(p, "dense", "none", s) for s in range(200))]
        sd = math.sqrt(0.6 * 0.4 / pairs)
        assert abs(np.mean(dens) - 0.6) <= 3 * sd
        assert all(abs(x - 0.6) <= 6 * sd for x in dens)

    def test_sparse_internal_degree(self):
        p = ModelParams(n=400, k=400, b=12)
        expect = 399 * 12 / 20
        means = [2 * g.m / 400 for g, _, _ in (generate(p, "sparse", "none", s) for s in range(10))]
        # mean internal degree of 400 nodes, pair probability 0.6
        sd = 2 * math.sqrt(math.comb(400, 2) * 0.6 * 0.4) / 400
        assert abs(np.mean(means) - expect) <= 3 * sd / math.sqrt(len(means))

    def test_max_rule_on_shared_pairs(self):
        prob = edge_probabilities(4, [(0, 1, 2), (1, 2, 3)],
                                  [np.array([0.5, 0.6, 0.7]), np.array([0.9, 0.8, 1.0])])
        assert prob[1, 2] == pytest.approx(0.72)
        assert prob[0, 3] == 0

    def test_ambient_never_inside_communities(self):
        p = ModelParams(n=200, k=40, d=2, num_communities=4, overlap=5, gamma=0.5)
        g, truth, _ = generate(p, "clique", AmbientSpec("uniform", q=0.2), 0)
        shared = truth.shared_matrix(200)
        for u, v in truth.ambient_edges.tolist():
            assert not shared[u, v]


class TestGenerate:
    def test_deterministic(self):
        p = io.model_params(io.read_config(CONFIGS / "clique.conf"))
        a = generate(p, "clique", "uniform", 11)
        b = generate(p, "clique", "uniform", 11)
        assert io.format_graph(a[0]) == io.format_graph(b[0])
        assert a[2] == b[2]
        assert io.format_communities(a[1].communities, a[1].affinities) == \
            io.format_communities(b[1].communities, b[1].affinities)

    def test_record_echoes_inputs(self):
        p = ModelParams(n=50, k=10)
        _, _, rec = generate(p, "clique", "none", 5)
        assert rec["seed"] == 5 and rec["params"] == p.to_dict() and rec["model"] == "clique"

    def test_clique_d1_validates(self):
        p = ModelParams(n=150, k=30, delta=0.5, num_communities=3, epsilon=0.3, gamma=0.5, beta=0.1)
        for seed in range(5):
            g, truth, _ = generate(p, "clique", "none", seed)
            assert validate(g, truth, p).passed

    def test_gap_stress_witnesses(self):
        p = io.model_params(io.read_config(CONFIGS / "gap-clique.conf"))
        for seed in range(10):
            g, truth, _ = generate(p, "clique", "gap-stress", seed)
            res = check_gap(g, truth, p)
            assert not res.passed
            assert sorted({w["node"] for w in res.witnesses}) == list(truth.stress_nodes)

    def test_overlap_bound_always(self):
        p = ModelParams(n=100, k=30, d=2, delta=0.5, num_communities=5)
        for seed in range(20):
            _, truth, _ = generate(p, "clique", "none", seed)
            assert truth.membership_counts(100).max() <= 2
