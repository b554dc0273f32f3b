"""Similar-size clique detection and its gap-relaxed variant."""
from __future__ import annotations

import math
import time

import numpy as np

from ..errors import InvalidParamsError
from ..graph import Graph, RngStream, closed_neighborhood, count_at_least
from . import steps
from .base import (CandidateSet, DetectionResult, DetectorParams, TrialOutcome,
                   checked_probability, draw_starts, empty_result, finish, run_trials,
                   start_count)


def clique_sample_probability(params: DetectorParams, epsilon: float) -> tuple[float, str]:
    k, d, delta, gamma = params.need("k", "d", "delta", "gamma")
    x = epsilon * delta * gamma
    if params.use_maximal_cliques:
        inner = math.log(d / x)
        if inner <= 0:
            raise InvalidParamsError("maximal-clique mode needs d/(eps*delta*gamma) > 1")
        p = math.log(24 * d * inner / x) / (delta * epsilon * k)
        formula = "ln(24d ln(d/(eps delta gamma))/(eps delta gamma))/(delta eps k)"
    else:
        p = math.log(12 * d / x) / (delta * epsilon * k)
        formula = "ln(12d/(eps delta gamma))/(delta eps k)"
    p *= params.sample_prob_scale
    return checked_probability(p, formula + " * sample_prob_scale"), formula


def _setup(g: Graph, params: DetectorParams, epsilon: float):
    k, delta = params.need("k", "delta")
    params.need("d", "gamma", "epsilon")
    if delta * k < 2:
        raise InvalidParamsError("need delta * k >= 2")
    p, _ = clique_sample_probability(params, epsilon)
    starts = start_count(9 * g.n / (delta * k), params)
    cap = math.floor(2 * p * k + 1e-9)
    return p, starts, cap


def _clique_trial(g, params, p, cap, v, rng, index, relaxed_eps=None):
    """One starting node. ``relaxed_eps`` switches to the trimming rule."""
    epsilon = params.epsilon
    k, delta = params.k, params.delta
    arena = closed_neighborhood(g, v)
    sample = steps.subsample(arena, p, rng)
    if sample is None:
        return TrialOutcome([], skipped=1)
    scanned = steps.clique_scan(g, arena, sample, cap, params.budget,
                                maximal_only=params.use_maximal_cliques)
    found = []
    seen = set()
    algo = "clique" if relaxed_eps is None else "gap-clique"
    min_size = count_at_least(delta, k)
    for vprime, u in scanned:
        if vprime.size == 0:
            continue
        if relaxed_eps is None:
            uprime = steps.degree_filter(g, vprime, 1 - epsilon / 2)
            if uprime.size < min_size or not steps.certify_clique(g, uprime, epsilon):
                continue
            members, dens = uprime, None
        else:
            members = steps.trim_low_density(g, vprime, 1 - relaxed_eps / 2, 1 - relaxed_eps)
            if members.size < count_at_least((1 - relaxed_eps) * delta, k):
                continue
            dens = steps.min_density(g, members)
        key = tuple(members.tolist())
        if key in seen:
            continue
        seen.add(key)
        found.append(CandidateSet(key, algo, index, starting_node=int(v), seed_set=u,
                                  alpha_used=1.0, min_density=dens))
    return TrialOutcome(found)


def _run(g, params, seed, workers, algorithm, eps_used, relaxed_eps):
    t0 = time.perf_counter()
    p, starts, cap = _setup(g, params, eps_used)
    effective = {"p": p, "starting_nodes": starts, "clique_size_cap": cap,
                 "epsilon_used": eps_used}
    if g.n == 0:
        return empty_result(algorithm, seed, params, effective)
    rng = RngStream(seed)
    vs = draw_starts(g.n, starts, rng.child(0))
    run_params = params.replace(epsilon=eps_used)
    items = [(g, run_params, p, cap, int(v), rng.child(1, i), i, relaxed_eps)
             for i, v in enumerate(vs)]
    outcomes = run_trials(_clique_trial, items, workers)
    return finish(algorithm, seed, params, outcomes, t0, effective)


def clique_find(g: Graph, params: DetectorParams, seed: int, workers: int = 1) -> DetectionResult:
    """Sampling search for similar-size clique communities.

    Each starting node ``v`` samples its closed neighbourhood, enumerates the
    cliques ``U`` of the sample, grows ``V'`` = neighbours of ``v`` adjacent to
    all of ``U``, keeps the high-degree core ``U'`` of ``G(V')`` and emits it
    when it is a clique of size >= delta*k that no outsider covers beyond a
    ``1 - epsilon`` fraction.
    """
    eps = params.need("epsilon")[0]
    return _run(g, params, seed, workers, "clique", eps, None)


def relaxed_epsilon(params: DetectorParams, denominator: float) -> float:
    if params.epsilon_prime is not None:
        return params.epsilon_prime
    eps, d, delta, gamma = params.need("epsilon", "d", "delta", "gamma")
    ratio = d / (delta * gamma)
    if ratio <= 1:
        raise InvalidParamsError("gap-relaxed variants need d/(delta*gamma) > 1")
    return eps * eps / (denominator * math.log(ratio))


def gap_relaxed_clique_find(g: Graph, params: DetectorParams, seed: int,
                            workers: int = 1) -> DetectionResult:
    """Clique search run with a smaller epsilon, followed by density trimming.

    Every ``V'`` is trimmed by repeatedly removing nodes of density below
    ``1 - epsilon/2`` until all remaining densities reach ``1 - epsilon``.
    Sets of at least ``(1 - epsilon) * delta * k`` nodes are emitted.
    """
    eps = params.need("epsilon")[0]
    eps_prime = relaxed_epsilon(params, 6.0)
    return _run(g, params, seed, workers, "gap-clique", eps_prime, eps)
