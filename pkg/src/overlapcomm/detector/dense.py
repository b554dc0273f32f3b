"""Similar-size dense community detection: uniform, robust and gap-relaxed."""
from __future__ import annotations

import math
import time

import numpy as np

from ..errors import InvalidParamsError
from ..graph import (Graph, RngStream, closed_neighborhood, count_at_least,
                     neighborhood_of_set)
from . import steps
from .base import (CandidateSet, DetectionResult, DetectorParams, TrialOutcome,
                   checked_probability, draw_starts, empty_result, finish, run_trials,
                   seed_sets, start_count)
from .clique import relaxed_epsilon


def _check_alpha_eps(alpha, eps):
    if not 0 < eps < alpha <= 1:
        raise InvalidParamsError("need 0 < epsilon < alpha <= 1")


def _emit_dense(g, scan, alpha, eps, algo, index, v, seed_set, seen, found):
    """Refine every ``V'`` at ``alpha - eps/2`` and keep certified ``U''`` sets."""
    lo, hi = alpha - eps / 8, alpha - 7 * eps / 8
    for members, row in steps.refine_and_certify(g, scan, alpha - eps / 2, lo, hi):
        key = tuple(members.tolist())
        if key in seen:
            continue
        seen.add(key)
        found.append(CandidateSet(key, algo, index, starting_node=int(v),
                                  seed_set=seed_set if seed_set is not None else scan.seed(row),
                                  alpha_used=alpha))


# uniform-density search --------------------------------------------------

def _dense_trial(g, params, p, cap, v, rng, index):
    alpha, eps = params.alpha, params.epsilon
    arena = closed_neighborhood(g, v)
    sample = steps.subsample(arena, p, rng)
    if sample is None:
        return TrialOutcome([], skipped=1)
    scanned = steps.subset_scan(g, arena, sample, cap, alpha - eps / 2, params.budget)
    found, seen = [], set()
    _emit_dense(g, scanned, alpha, eps, "dense", index, v, None, seen, found)
    return TrialOutcome(found)


def dense_find(g: Graph, params: DetectorParams, seed: int, workers: int = 1) -> DetectionResult:
    """Sampling search for communities of one known density ``alpha``.

    Every subset ``U`` of a neighbourhood sample of size <= 2pk seeds
    ``V'`` (neighbours reaching ``alpha - eps/2`` of ``U``), its degree core
    ``U'`` and the extension ``U''``; ``U''`` is kept when it is an
    ``(alpha - eps/8, alpha - 7eps/8)``-set.
    """
    t0 = time.perf_counter()
    k, d, delta, eps, gamma, alpha = params.need("k", "d", "delta", "epsilon", "gamma", "alpha")
    _check_alpha_eps(alpha, eps)
    formula = "2 ln(30d/(alpha eps delta gamma))/(alpha^2 delta eps^2 k) * sample_prob_scale"
    p = checked_probability(
        2 * math.log(30 * d / (alpha * eps * delta * gamma))
        / (alpha**2 * delta * eps**2 * k) * params.sample_prob_scale, formula)
    starts = start_count(100 * g.n / (delta * k), params)
    cap = math.floor(2 * p * k + 1e-9)
    effective = {"p": p, "starting_nodes": starts, "subset_size_cap": cap}
    if g.n == 0:
        return empty_result("dense", seed, params, effective)
    rng = RngStream(seed)
    vs = draw_starts(g.n, starts, rng.child(0))
    items = [(g, params, p, cap, int(v), rng.child(1, i), i) for i, v in enumerate(vs)]
    return finish("dense", seed, params, run_trials(_dense_trial, items, workers), t0, effective)


# robust search over seed sets ----------------------------------------------

def robust_seed_size(params: DetectorParams) -> int:
    if params.t_override is not None:
        return int(params.t_override)
    eps, alpha = params.need("epsilon", "alpha")
    return math.ceil(2 * math.log(10 / eps) / alpha - 1e-9)


def robust_sample_probability(params: DetectorParams, t: int, eps: float) -> float:
    k, d, delta, gamma, alpha = params.need("k", "d", "delta", "gamma", "alpha")
    p = (params.robust_p_constant * math.log(120 * t * d / (eps * delta * gamma))
         / (alpha * delta * eps**2 * k) * params.sample_prob_scale)
    return checked_probability(
        p, "robust_p_constant ln(120Td/(eps delta gamma))/(alpha delta eps^2 k) * sample_prob_scale")


def _robust_trial(g, params, p, cap, t, v, rng, index, algo, relaxed_eps):
    alpha, eps = params.alpha, params.epsilon
    pool = closed_neighborhood(g, v)
    if t > len(pool):
        return TrialOutcome([], ran=0, skipped=1)
    found, seen = [], set()
    ran = skipped = 0
    for j, s in enumerate(seed_sets(pool, t, params, rng.child(0))):
        ran += 1
        trial_rng = rng.child(1, j)
        arena = neighborhood_of_set(g, s)
        sample = steps.subsample(arena, p, trial_rng)
        if sample is None:
            skipped += 1
            continue
        scanned = steps.subset_scan(g, arena, sample, cap, alpha - eps / 2, params.budget)
        if relaxed_eps is None:
            _emit_dense(g, scanned, alpha, eps, algo, index, v, s, seen, found)
            continue
        # threshold drawn once per (starting node, seed set)
        tau = trial_rng.gen.uniform(alpha - relaxed_eps / 2, alpha - 0.4 * relaxed_eps)
        floor = alpha - relaxed_eps
        min_size = count_at_least((1 - relaxed_eps) * params.delta, params.k)
        for vprime, _u in scanned:
            if vprime.size == 0:
                continue
            members = steps.trim_low_density(g, vprime, tau, floor)
            if members.size < max(1, min_size):
                continue
            key = tuple(members.tolist())
            if key in seen:
                continue
            seen.add(key)
            found.append(CandidateSet(key, algo, index, starting_node=int(v), seed_set=s,
                                      alpha_used=alpha,
                                      min_density=steps.min_density(g, members)))
    return TrialOutcome(found, ran=ran, skipped=skipped)


def _robust_run(g, params, seed, workers, algo, eps_used, relaxed_eps):
    t0 = time.perf_counter()
    k, delta, alpha = params.need("k", "delta", "alpha")
    params.need("d", "gamma", "epsilon")
    _check_alpha_eps(alpha, params.epsilon)
    t = robust_seed_size(params)
    p = robust_sample_probability(params, t, eps_used)
    starts = start_count(100 * g.n / (delta * k), params)
    cap = math.floor(2 * p * k + 1e-9)
    effective = {"T": t, "p": p, "starting_nodes": starts, "subset_size_cap": cap,
                 "epsilon_used": eps_used}
    if g.n == 0:
        return empty_result(algo, seed, params, effective)
    rng = RngStream(seed)
    vs = draw_starts(g.n, starts, rng.child(0))
    run_params = params.replace(epsilon=eps_used)
    items = [(g, run_params, p, cap, t, int(v), rng.child(1, i), i, algo, relaxed_eps)
             for i, v in enumerate(vs)]
    return finish(algo, seed, params, run_trials(_robust_trial, items, workers), t0, effective)


def robust_dense_find(g: Graph, params: DetectorParams, seed: int,
                      workers: int = 1) -> DetectionResult:
    """Dense search tolerant of heterogeneous affinities.

    For each starting node, every ``T``-subset ``S`` of its closed
    neighbourhood (or ``max_seed_sets`` random ones) defines the arena
    ``S + N(S)``; the rest follows :func:`dense_find` inside that arena.
    """
    return _robust_run(g, params, seed, workers, "robust", params.need("epsilon")[0], None)


def gap_relaxed_dense_find(g: Graph, params: DetectorParams, seed: int,
                           workers: int = 1) -> DetectionResult:
    """Robust search with a reduced epsilon plus randomised density trimming.

    Nodes of density below a threshold ``tau`` drawn uniformly from
    ``[alpha - eps/2, alpha - 0.4 eps]`` are removed until every remaining
    density is at least ``alpha - eps``.
    """
    eps = params.need("epsilon")[0]
    return _robust_run(g, params, seed, workers, "gap-dense", relaxed_epsilon(params, 10.0), eps)
