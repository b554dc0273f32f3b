"""Detectors for communities of very different sizes."""
from __future__ import annotations

import math
import time
from itertools import combinations

import numpy as np

from ..errors import BudgetExceededError, InvalidParamsError
from ..graph import Graph, RngStream, closed_neighborhood, count_more_than
from . import steps
from .base import (CandidateSet, DetectionResult, DetectorParams, TrialOutcome,
                   checked_probability, draw_starts, empty_result, finish, run_trials,
                   seed_sets, start_count)


def density_levels(alpha_min: float, epsilon: float) -> list[float]:
    """``1, 1 - eps/4, ...`` down to ``alpha_min``, which is always the last level."""
    step = epsilon / 4
    levels = []
    i = 0
    while True:
        a = 1.0 - i * step
        if a <= alpha_min + 1e-12:
            break
        levels.append(a)
        i += 1
    levels.append(float(alpha_min))
    return levels


def any_size_seed_size(params: DetectorParams) -> int:
    if params.t_override is not None:
        return int(params.t_override)
    k, d, gamma, alpha_min, eps = params.need("k", "d", "gamma", "alpha_min", "epsilon")
    return math.ceil(100 * math.log(k * d / gamma) / (alpha_min * eps**2) - 1e-9)


def any_size_dense_find(g: Graph, params: DetectorParams, seed: int = 0,
                        workers: int = 1) -> DetectionResult:
    """Exhaustive seed-set search over a ladder of densities; no randomness.

    For every ``T``-set ``S`` and level ``alpha``, ``U`` is the set of nodes
    reaching more than ``alpha - eps/4`` of ``S``; ``U`` is kept when it is
    an ``(alpha, alpha - eps/2)``-set.
    """
    t0 = time.perf_counter()
    alpha_min, eps = params.need("alpha_min", "epsilon")
    if not 0 < alpha_min <= 1 or not 0 < eps < 1:
        raise InvalidParamsError("need 0 < alpha_min <= 1 and 0 < epsilon < 1")
    t = any_size_seed_size(params)
    levels = density_levels(alpha_min, eps)
    n_sets = math.comb(g.n, t)
    effective = {"T": t, "levels": levels, "seed_sets": n_sets}
    if g.n == 0 or n_sets == 0:
        return empty_result("anysize-dense", seed, params, effective)
    if n_sets * len(levels) > params.budget:
        raise BudgetExceededError(
            f"C({g.n},{t}) x {len(levels)} levels = {n_sets * len(levels)} "
            f"exceeds budget {params.budget}")
    adj = g.dense().astype(np.int32)
    np.fill_diagonal(adj, 1)
    thresholds = [count_more_than(a - eps / 4, t) for a in levels]
    chunks = []
    chunk = 4096
    combo_iter = combinations(range(g.n), t)
    while True:
        block = np.array(list(_take(combo_iter, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        chunks.append(block.reshape(-1, t))
    items = [(g, adj, block, levels, thresholds, eps, ci * chunk) for ci, block in enumerate(chunks)]
    outcomes = run_trials(_anysize_dense_block, items, workers)
    return finish("anysize-dense", seed, params, outcomes, t0, effective)


def _take(it, n):
    for _ in range(n):
        try:
            yield next(it)
        except StopIteration:
            return


def _anysize_dense_block(g, adj, block, levels, thresholds, eps, offset):
    # counts[c, w]: self-inclusive adjacency of w into the c-th seed set
    counts = adj[:, block].sum(axis=2).T
    found = []
    checked = {}
    for li, (alpha, thr) in enumerate(zip(levels, thresholds)):
        hit = counts >= thr
        packed = np.packbits(hit, axis=1)
        _, first = np.unique(packed, axis=0, return_index=True)
        for ci in np.sort(first):
            u = np.nonzero(hit[ci])[0]
            if u.size == 0:
                continue
            key = (tuple(u.tolist()), alpha)
            if key not in checked:
                checked[key] = steps.certify_dense(g, u, alpha, alpha - eps / 2)
            if checked[key]:
                found.append(CandidateSet(key[0], "anysize-dense", offset + int(ci),
                                          seed_set=tuple(int(x) for x in block[ci]),
                                          alpha_used=alpha))
    return TrialOutcome(found, ran=block.shape[0])


# any-size cliques ----------------------------------------------------------

class EdgeLedger:
    """Communities already emitted; their internal edges are excluded from ``N-``."""

    def __init__(self, g: Graph):
        self.g = g
        self.communities: list[tuple] = []
        self._owned = [np.zeros(g.n_words, dtype=np.uint64) for _ in range(g.n)]

    def add(self, members):
        members = tuple(members)
        self.communities.append(members)
        mask = self.g.mask(members)
        for u in members:
            self._owned[u] |= mask

    def free_neighborhood(self, s) -> tuple:
        """``S`` plus nodes joined to ``S`` by an edge no emitted community owns."""
        acc = self.g.mask(s)
        for u in s:
            acc |= self.g.rows[u] & ~self._owned[u]
        return _mask_nodes(acc, self.g.n)

    def owns(self, u: int, v: int) -> bool:
        return bool((int(self._owned[u][v >> 6]) >> (v & 63)) & 1) and self.g.has_edge(u, v)


def _mask_nodes(mask, n):
    bits = np.unpackbits(mask.view(np.uint8), bitorder="little")[:n]
    return tuple(np.nonzero(bits)[0].tolist())


def _anysize_clique_trial(g, params, ledger, level, p, cap, t, v, rng, index):
    eps = params.epsilon
    pool = closed_neighborhood(g, v)
    if t > len(pool):
        return TrialOutcome([], ran=0, skipped=1)
    found, seen = [], set()
    ran = skipped = 0
    for j, s in enumerate(seed_sets(pool, t, params, rng.child(0))):
        ran += 1
        arena = ledger.free_neighborhood(s)
        sample = steps.subsample(arena, p, rng.child(1, j))
        if sample is None:
            skipped += 1
            continue
        scope = arena if params.restricted_scope else pool
        for vprime, _u in steps.clique_scan(g, scope, sample, cap, params.budget):
            if vprime.size == 0:
                continue
            uprime = steps.degree_filter(g, vprime, 1 - eps / 4)
            if uprime.size == 0 or not steps.is_clique(g, uprime):
                continue
            key0 = tuple(uprime.tolist())
            if key0 in seen:
                continue
            seen.add(key0)
            u2 = steps.greedy_maximal_clique(g, uprime)
            if steps.certify_clique(g, u2, eps):
                found.append(CandidateSet(tuple(u2.tolist()), "anysize-clique", index,
                                          starting_node=int(v), seed_set=s, alpha_used=1.0))
    return TrialOutcome(found, ran=ran, skipped=skipped)


def any_size_clique_seed_size(params: DetectorParams) -> int:
    if params.t_override is not None:
        return int(params.t_override)
    eps, beta = params.need("epsilon", "beta")
    return math.ceil(math.log(2 / eps) / beta - 1e-9)


def any_size_clique_find(g: Graph, params: DetectorParams, seed: int,
                         workers: int = 1) -> DetectionResult:
    """Level-by-level clique search from size ``k`` down to ``m``.

    Level ``l`` halves each round. Edges inside communities emitted at
    earlier levels are ignored when forming the seed-set neighbourhood, so
    smaller cliques are not drowned by larger ones. Candidates are greedily
    extended to maximal cliques.
    """
    t0 = time.perf_counter()
    k, m, d, eps, gamma = params.need("k", "m", "d", "epsilon", "gamma")
    if m < 1 or m > k:
        raise InvalidParamsError("need 1 <= m <= k")
    t = any_size_clique_seed_size(params)
    levels = []
    lvl = float(k)
    while lvl >= m:
        levels.append(lvl)
        lvl /= 2
    probs = []
    for lvl in levels:
        p = 4 * math.log(30 * t * d / (eps * gamma)) / (eps * lvl) * params.sample_prob_scale
        probs.append(checked_probability(
            p, f"4 ln(30Td/(eps gamma))/(eps l) * sample_prob_scale at l={lvl:g}"))
    effective = {"T": t, "levels": levels, "p": probs}
    if g.n == 0:
        return empty_result("anysize-clique", seed, params, effective)
    rng = RngStream(seed)
    ledger = EdgeLedger(g)
    outcomes = []
    log_n = math.log(g.n) if g.n > 1 else 1.0
    starts_per_level = []
    for li, (lvl, p) in enumerate(zip(levels, probs)):
        starts = start_count(100 * g.n * log_n / lvl, params)
        starts_per_level.append(starts)
        cap = math.floor(2 * p * lvl + 1e-9)
        lrng = rng.child(li)
        vs = draw_starts(g.n, starts, lrng.child(0))
        base = li * 10**9
        items = [(g, params, ledger, lvl, p, cap, t, int(v), lrng.child(1, i), base + i)
                 for i, v in enumerate(vs)]
        level_out = run_trials(_anysize_clique_trial, items, workers)
        outcomes.extend(level_out)
        # barrier: the ledger grows only between levels
        known = set(ledger.communities)
        new = sorted({c.members for o in level_out for c in o.candidates} - known)
        for members in new:
            ledger.add(members)
    effective["starting_nodes"] = starts_per_level
    return finish("anysize-clique", seed, params, outcomes, t0, effective)
