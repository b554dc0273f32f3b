"""Acceptance criteria, one test each.

Every test stores a one-line verdict that the terminal summary prints under
"acceptance criteria", then asserts it.
"""
import functools
import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from overlapcomm import (DetectorParams, Graph, generate, io, is_alpha_epsilon_set,
                         square_transform, validate)
from overlapcomm.detector import run
from overlapcomm.evaluation import relaxed_match
from overlapcomm.oracle import (count_length2_paths_matrix, enumerate_alpha_epsilon_sets,
                                enumerate_maximal_cliques)
from overlapcomm.validator import check_gamma, check_gamma_prime, check_gap

from conftest import ACCEPTANCE_LINES, gnp, planted

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
pytestmark = pytest.mark.slow


def record(num, title, passed, detail, seconds):
    mark = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES[f"{num:02d}"] = f"[{mark}] {num:>2}. {title}: {detail} ({seconds:.1f}s)"
    assert passed, ACCEPTANCE_LINES[f"{num:02d}"]


def conf(name):
    return io.read_config(CONFIGS / name)


def strip_wall(text):
    d = json.loads(text)
    d["stats"].pop("wall_time_ms")
    return json.dumps(d, sort_keys=True)


# criteria 3 to 5 share their runs with criterion 10 --------------------------

RECOVERY = {
    3: ("clique.conf", "clique.conf", "clique", "uniform", "clique", 50),
    4: ("dense-model.conf", "dense-detect.conf", "dense", "uniform", "dense", 50),
    5: ("affinity-model.conf", "robust-detect.conf", "affinity", "uniform", "robust", 50),
}


@functools.lru_cache(maxsize=None)
def recovery_runs(criterion, workers=1):
    model_conf, det_conf, model, ambient, algo, seeds = RECOVERY[criterion]
    mp = io.model_params(conf(model_conf))
    dp = io.detector_params(conf(det_conf))
    out = []
    t0 = time.perf_counter()
    for s in range(seeds):
        g, truth, _ = generate(mp, model, ambient, s)
        res = run(algo, g, dp, s, workers)
        out.append((g, truth, res, io.dump_json(res.to_json_dict())))
    return out, time.perf_counter() - t0, mp, dp


def test_criterion_01_oracle_equivalence_dense():
    t0 = time.perf_counter()
    params = {
        "dense": DetectorParams(k=6, d=1, delta=0.5, gamma=1, epsilon=0.4, alpha=0.8,
                                sample_prob_scale=0.02),
        "robust": DetectorParams(k=6, d=1, delta=0.5, gamma=1, epsilon=0.4, alpha=0.8, t_override=2,
                                 sample_prob_scale=0.02, max_seed_sets=3),
        "anysize-dense": DetectorParams(k=6, d=1, gamma=1, epsilon=0.4, alpha_min=0.7, t_override=2),
    }
    violations, emitted = 0, {a: 0 for a in params}
    for seed in range(100):
        gen = np.random.default_rng(seed)
        n = int(gen.integers(8, 15))
        blocks = [int(gen.integers(3, min(6, n // 2) + 1)) for _ in range(2)]
        g, _ = planted(n, blocks, 0.9, 0.15, seed)
        lists = {}
        for algo, p in params.items():
            for c in run(algo, g, p, seed).candidates:
                emitted[algo] += 1
                if algo == "anysize-dense":
                    # (a, a - eps/2) is the (a' - e'/8, a' - 7e'/8) form with a' = a + eps/12, e' = 2 eps/3
                    hi, lo = c.alpha_used, c.alpha_used - p.epsilon / 2
                else:
                    hi, lo = p.alpha - p.epsilon / 8, p.alpha - 7 * p.epsilon / 8
                key = (round(hi, 12), round(lo, 12))
                if key not in lists:
                    lists[key] = set(enumerate_alpha_epsilon_sets(g, hi, lo))
                ok = is_alpha_epsilon_set(g, c.members, hi, lo) and c.members in lists[key]
                violations += not ok
    dt = time.perf_counter() - t0
    total = sum(emitted.values())
    nonvacuous = all(v > 0 for v in emitted.values())
    record(1, "oracle equivalence (dense)", violations == 0 and nonvacuous and dt < 120,
           f"{violations} violations over {total} candidates {emitted}, 100 graphs n<=14", dt)


def test_criterion_02_oracle_equivalence_clique():
    t0 = time.perf_counter()
    clique_p = DetectorParams(k=10, d=1, delta=0.5, gamma=1, epsilon=0.5, sample_prob_scale=0.5)
    any_p = DetectorParams(k=16, m=4, d=1, gamma=1, epsilon=0.5, beta=0.5, t_override=2,
                           max_seed_sets=3, sample_prob_scale=0.1, trial_count_scale=0.02)
    violations, emitted = 0, {"clique": 0, "anysize-clique": 0}
    for seed in range(100):
        gen = np.random.default_rng(seed)
        n = int(gen.integers(20, 61))
        blocks = [int(gen.integers(5, min(10, n // 3) + 1)) for _ in range(3)]
        g, _ = planted(n, blocks, 1.0, 0.05, seed)
        adj = g.adj_sets()
        oracle = enumerate_maximal_cliques(g)
        for algo, p, min_size in (("clique", clique_p, math.ceil(0.5 * 10)), ("anysize-clique", any_p, 1)):
            allowed = set()
            for c in oracle:
                if len(c) < min_size:
                    continue
                cs = set(c)
                worst = max((len(adj[w] & cs) for w in range(g.n) if w not in cs), default=0)
                if worst <= math.floor((1 - p.epsilon) * len(c) + 1e-9):
                    allowed.add(c)
            for c in run(algo, g, p, seed).member_sets:
                emitted[algo] += 1
                violations += c not in allowed
    dt = time.perf_counter() - t0
    total = sum(emitted.values())
    record(2, "oracle equivalence (clique)", violations == 0 and all(emitted.values()) and dt < 120,
           f"{violations} violations over {total} candidates {emitted}, 100 graphs n<=60", dt)


def _rates(runs, relaxed_eps=None):
    n_comm = len(runs[0][1].communities)
    exact = np.zeros(n_comm, dtype=int)
    either = np.zeros(n_comm, dtype=int)
    for g, truth, res, _ in runs:
        found = set(res.member_sets)
        for i, c in enumerate(truth.communities):
            hit = c in found
            exact[i] += hit
            if not hit and relaxed_eps is not None:
                hit = any(relaxed_match(f, c, g, relaxed_eps) for f in found)
            either[i] += hit
    return exact, either


def test_criterion_03_clique_recovery():
    runs, dt, mp, dp = recovery_runs(3)
    exact, _ = _rates(runs)
    need = math.ceil(0.6 * len(runs))
    ok = all(e >= need for e in exact) and dt < 600
    detail = ", ".join(f"clique {i}: {e}/{len(runs)}" for i, e in enumerate(exact))
    record(3, "clique recovery", ok, f"{detail} exact (need >= {need})", dt)


def test_criterion_04_dense_recovery():
    runs, dt, mp, dp = recovery_runs(4)
    ambient_ok = sum(all(chk(g, t, mp).passed for chk in (check_gap, check_gamma, check_gamma_prime))
                     for g, t, _, _ in runs)
    exact, _ = _rates(runs)
    need = math.ceil(0.5 * len(runs))
    ok = exact[0] >= need and ambient_ok == len(runs) and dt < 600
    record(4, "dense recovery", ok,
           f"{exact[0]}/{len(runs)} exact (need >= {need}); ambient checks passed on "
           f"{ambient_ok}/{len(runs)}; detector alpha {dp.alpha} vs planted {mp.alpha}", dt)


def test_criterion_05_robust_recovery():
    runs, dt, mp, dp = recovery_runs(5)
    exact, either = _rates(runs, relaxed_eps=dp.epsilon)
    need = math.ceil(0.5 * len(runs))
    ok = either[0] >= need and dt < 900
    record(5, "robust recovery, heterogeneous affinities", ok,
           f"{either[0]}/{len(runs)} exact or relaxed ({exact[0]} exact; need >= {need}), T=3", dt)


def test_criterion_06_any_size_deterministic():
    t0 = time.perf_counter()
    edges = list(itertools.combinations(range(8), 2)) + list(itertools.combinations(range(10, 15), 2))
    g = Graph.from_edges(20, edges)
    p = DetectorParams(k=8, d=1, gamma=1, epsilon=0.4, alpha_min=1.0, t_override=3)
    a = run("anysize-dense", g, p, 0)
    b = run("anysize-dense", g, p, 1)
    found = set(a.member_sets)
    both = {tuple(range(8)), tuple(range(10, 15))} <= found
    same = strip_wall(io.dump_json(a.to_json_dict())).replace('"seed": 0', "") == \
        strip_wall(io.dump_json(b.to_json_dict())).replace('"seed": 1', "")
    dt = time.perf_counter() - t0
    record(6, "any-size determinism and recovery", both and same and dt < 60,
           f"K8 and K5 found: {both}; repeated runs identical: {same}; {len(found)} candidates", dt)


def test_criterion_07_gap_relaxation():
    t0 = time.perf_counter()
    mp = io.model_params(conf("gap-clique.conf"))
    dp = io.detector_params(conf("gap-clique.conf"))
    good_seeds, emitted, clause_fail = 0, 0, 0
    for s in range(50):
        g, truth, _ = generate(mp, "clique", "gap-stress", s)
        c = set(truth.communities[0])
        adj = g.adj_sets()
        res = run("gap-clique", g, dp, s)
        hit = False
        for cand in res.member_sets:
            emitted += 1
            cs = set(cand)
            dens = min(len(adj[v] & cs) + 1 for v in cand) / len(cand)
            clause = dens >= 0.6 - 1e-12
            clause_fail += not clause
            hit |= clause and len(cs & c) >= 0.6 * 40
        good_seeds += hit
    dt = time.perf_counter() - t0
    ok = good_seeds >= 25 and clause_fail == 0 and emitted > 0
    record(7, "gap relaxation contract", ok,
           f"{good_seeds}/50 seeds with a valid C' (need >= 25); density clause failed on "
           f"{clause_fail}/{emitted} emitted sets", dt)


def test_criterion_08_sparse():
    t0 = time.perf_counter()
    mp = io.model_params(conf("sparse.conf"))
    dp = io.detector_params(conf("sparse.conf"))
    dens_ok = recovered = 0
    worst_in, worst_cross = 1.0, 0.0
    for s in range(30):
        g, truth, _ = generate(mp, "sparse", "none", s)
        gp = square_transform(g, dp.b, dp.k)
        a = gp.dense()
        c1, c2 = (np.asarray(c) for c in truth.communities)
        intra = min(a[np.ix_(c, c)].sum() / (len(c) * (len(c) - 1)) for c in (c1, c2))
        cross = a[np.ix_(c1, c2)].sum() / (len(c1) * len(c2))
        worst_in, worst_cross = min(worst_in, intra), max(worst_cross, cross)
        dens_ok += intra >= 0.85 and cross <= 0.25
        found = set(run("sparse", g, dp, s).member_sets)
        recovered += set(truth.communities) <= found
    dt = time.perf_counter() - t0
    ok = dens_ok >= 27 and recovered >= 15 and dt < 900
    record(8, "sparse transform and pipeline", ok,
           f"density targets met on {dens_ok}/30 (need >= 27; worst intra {worst_in:.3f}, "
           f"worst cross {worst_cross:.3f}); both communities recovered on {recovered}/30 (need >= 15)", dt)


DEFAULTS = [("clique.conf", "clique", "uniform"), ("dense.conf", "dense", "uniform"),
            ("affinity-model.conf", "affinity", "uniform"),
            ("anysize-clique.conf", "anysize-clique", "uniform"),
            ("anysize-dense.conf", "anysize-dense", "uniform"), ("sparse.conf", "sparse", "none")]


def test_criterion_09_validator_fidelity():
    t0 = time.perf_counter()
    passes = {}
    for name, model, ambient in DEFAULTS:
        mp = io.model_params(conf(name))
        passes[name] = sum(validate(*generate(mp, model, ambient, s)[:2], mp).passed for s in range(100))
    exact_witness = 0
    for name, model in (("gap-clique.conf", "clique"), ("gap-dense.conf", "dense")):
        mp = io.model_params(conf(name))
        for s in range(100):
            g, truth, _ = generate(mp, model, "gap-stress", s)
            res = check_gap(g, truth, mp)
            exact_witness += (not res.passed and
                              sorted({w["node"] for w in res.witnesses}) == list(truth.stress_nodes))
    dt = time.perf_counter() - t0
    ok = all(v >= 95 for v in passes.values()) and exact_witness == 200
    detail = ", ".join(f"{k.removesuffix('.conf')} {v}/100" for k, v in passes.items())
    record(9, "validator fidelity", ok,
           f"defaults passing: {detail} (need >= 95 each); gap witnesses equal stress nodes on "
           f"{exact_witness}/200", dt)


def test_criterion_10_parallel_determinism():
    t0 = time.perf_counter()
    same = total = 0
    for crit in (3, 4, 5):
        one = recovery_runs(crit, 1)[0]
        many = recovery_runs(crit, 8)[0]
        for (_, _, _, a), (_, _, _, b) in zip(one, many):
            total += 1
            same += strip_wall(a) == strip_wall(b)
    dt = time.perf_counter() - t0
    record(10, "determinism under parallelism", same == total and total == 150,
           f"{same}/{total} result files identical between 1 and 8 workers", dt)


def test_criterion_11_square_transform_exact():
    t0 = time.perf_counter()
    equal = 0
    for seed in range(50):
        gen = np.random.default_rng(seed)
        n = int(gen.integers(2, 51))
        g = gnp(n, float(gen.uniform(0.1, 0.8)), seed)
        b = float(gen.uniform(1.0, 5.0))
        want = count_length2_paths_matrix(g) >= math.ceil(b * b / 2 - 1e-9)
        np.fill_diagonal(want, False)
        equal += np.array_equal(square_transform(g, b).dense(), want)
    dt = time.perf_counter() - t0
    record(11, "square transform exactness", equal == 50, f"{equal}/50 graphs match entry for entry", dt)
