"""Per-assumption checks of a planted instance.

Every check is an exact count over the realised graph. Fractions are kept
as :class:`fractions.Fraction` and serialised as ``[numerator, denominator]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .generator import ANY_SIZE, GroundTruth, ModelParams
from .graph import Graph

MAX_WITNESSES = 1000


@dataclass
class CheckResult:
    name: str
    passed: bool
    applicable: bool = True
    witnesses: list = field(default_factory=list)
    margin: Optional[object] = None
    note: str = ""

    def to_json_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "applicable": self.applicable,
                "witnesses": [_jsonable(w) for w in self.witnesses],
                "margin": _jsonable(self.margin), "note": self.note}


@dataclass
class AssumptionReport:
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values() if c.applicable)

    def failed(self) -> list[str]:
        return [k for k, c in self.checks.items() if c.applicable and not c.passed]

    def to_json_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": {k: c.to_json_dict() for k, c in self.checks.items()}}


def _jsonable(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _closed_counts(g: Graph, members) -> np.ndarray:
    """Self-inclusive neighbour count of every node in ``members``."""
    idx = np.asarray(members, dtype=np.int64)
    c = np.zeros(g.n, dtype=np.int64)
    for u in idx:
        c[g.neighbors(u)] += 1
    c[idx] += 1
    return c


def check_gap(g: Graph, truth: GroundTruth, params: ModelParams) -> CheckResult:
    """Outsiders of ``C`` reach less than ``alpha_C - epsilon`` of ``C``."""
    if not truth.communities:
        raise InvalidInputError("ground truth has no communities")
    if params.epsilon is None:
        return CheckResult("gap", True, applicable=False, note="epsilon not set")
    wit, worst = [], None
    for ci, c in enumerate(truth.communities):
        size = len(c)
        limit = Fraction(truth.alpha_floor(ci)).limit_denominator(10**12) - Fraction(params.epsilon).limit_denominator(10**12)
        counts = _closed_counts(g, c)
        inside = np.zeros(g.n, dtype=bool)
        inside[list(c)] = True
        for w in np.nonzero(~inside)[0]:
            f = Fraction(int(counts[w]), size)
            slack = limit - f
            if worst is None or slack < worst:
                worst = slack
            if f >= limit and len(wit) < MAX_WITNESSES:
                wit.append({"node": int(w), "community": ci, "fraction": f})
    return CheckResult("gap", not wit, witnesses=wit, margin=worst)


def community_edge_mask(g: Graph, truth: GroundTruth) -> np.ndarray:
    """Per-edge flag (aligned with ``g.edges()``): endpoints share a community."""
    shared = truth.shared_matrix(g.n)
    e = g.edges()
    if e.size == 0:
        return np.zeros(0, dtype=bool)
    return shared[e[:, 0], e[:, 1]]


def _degree_split(g: Graph, truth: GroundTruth):
    e = g.edges()
    comm = community_edge_mask(g, truth)
    cdeg = np.zeros(g.n, dtype=np.int64)
    adeg = np.zeros(g.n, dtype=np.int64)
    if e.size:
        np.add.at(cdeg, e[comm, 0], 1)
        np.add.at(cdeg, e[comm, 1], 1)
        np.add.at(adeg, e[~comm, 0], 1)
        np.add.at(adeg, e[~comm, 1], 1)
    return cdeg, adeg


def check_gamma(g: Graph, truth: GroundTruth, params: ModelParams) -> CheckResult:
    """Community members have at least a ``gamma`` fraction of community edges.

    Nodes outside every community are exempt: they have no community edges.
    """
    cdeg, adeg = _degree_split(g, truth)
    members = truth.membership_counts(g.n) > 0
    gamma = Fraction(params.gamma).limit_denominator(10**12)
    wit, worst = [], None
    for v in np.nonzero(members)[0]:
        total = int(cdeg[v] + adeg[v])
        if total == 0:
            continue
        f = Fraction(int(cdeg[v]), total)
        slack = f - gamma
        if worst is None or slack < worst:
            worst = slack
        if f < gamma and len(wit) < MAX_WITNESSES:
            wit.append({"node": int(v), "fraction": f})
    return CheckResult("gamma", not wit, witnesses=wit, margin=worst,
                       note="nodes in no community are exempt")


def check_gamma_prime(g: Graph, truth: GroundTruth, params: ModelParams) -> CheckResult:
    """Each community containing ``v`` has at least ``(gamma/d) * ambient_deg(v)`` nodes."""
    _, adeg = _degree_split(g, truth)
    ratio = Fraction(params.gamma).limit_denominator(10**12) / params.d
    wit, worst = [], None
    for ci, c in enumerate(truth.communities):
        size = len(c)
        for v in c:
            need = ratio * int(adeg[v])
            slack = size - need
            if worst is None or slack < worst:
                worst = slack
            if size < need and len(wit) < MAX_WITNESSES:
                wit.append({"node": int(v), "community": ci, "size": size,
                            "ambient_degree": int(adeg[v]), "required": need})
    return CheckResult("gamma_prime", not wit, witnesses=wit, margin=worst)


def check_distinctness(g: Graph, truth: GroundTruth, params: ModelParams) -> CheckResult:
    """``|C minus the other communities of u| >= beta |C|`` for every member ``u``."""
    if params.beta is None:
        return CheckResult("distinctness", True, applicable=False, note="beta not set")
    beta = Fraction(params.beta).limit_denominator(10**12)
    sets = [set(c) for c in truth.communities]
    of_node: dict[int, list[int]] = {}
    for ci, c in enumerate(truth.communities):
        for u in c:
            of_node.setdefault(u, []).append(ci)
    wit, worst = [], None
    cache: dict = {}
    for u, cis in sorted(of_node.items()):
        for ci in cis:
            others = tuple(x for x in cis if x != ci)
            key = (ci, others)
            if key not in cache:
                rest = set().union(*(sets[x] for x in others)) if others else set()
                cache[key] = len(sets[ci] - rest)
            own = cache[key]
            need = beta * len(sets[ci])
            slack = own - need
            if worst is None or slack < worst:
                worst = slack
            if own < need and len(wit) < MAX_WITNESSES:
                wit.append({"node": int(u), "community": ci, "distinct": own, "required": need})
    return CheckResult("distinctness", not wit, witnesses=wit, margin=worst)


def size_band(truth: GroundTruth, params: ModelParams) -> tuple[int, int]:
    k = params.k
    if truth.model == "sparse":
        return k, k
    if truth.model in ANY_SIZE:
        return params.m, k
    return math.ceil(params.delta * k - 1e-9), k


def check_overlap_and_sizes(truth: GroundTruth, params: ModelParams,
                            n: Optional[int] = None) -> CheckResult:
    n = n if n is not None else params.n
    wit = []
    cnt = truth.membership_counts(n)
    for v in np.nonzero(cnt > params.d)[0]:
        wit.append({"kind": "overlap", "node": int(v), "memberships": int(cnt[v])})
    lo, hi = size_band(truth, params) if params.k is not None else (1, n)
    for ci, c in enumerate(truth.communities):
        if not lo <= len(c) <= hi:
            wit.append({"kind": "size", "community": ci, "size": len(c), "band": [lo, hi]})
    if truth.model == "sparse":
        limit = Fraction(params.k, 20 * params.d * params.d)
        sets = [set(c) for c in truth.communities]
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                inter = len(sets[i] & sets[j])
                if inter > limit:
                    wit.append({"kind": "intersection", "communities": [i, j],
                                "size": inter, "limit": limit})
    return CheckResult("overlap_and_sizes", not wit, witnesses=wit[:MAX_WITNESSES])


def check_regularity_empirical(g: Graph, truth: GroundTruth, params: ModelParams) -> CheckResult:
    """Realisation-level stand-ins for concentration and regularity.

    Internal degrees must lie within ``(1 +- eps)`` of their expectation
    under the affinities, and every member pair ``(u, v)`` must share at
    least ``(1 - eps) * alpha_C * deg_C(v)`` internal neighbours, both
    counted over closed neighbourhoods.
    """
    if params.epsilon is None:
        return CheckResult("regularity", True, applicable=False, note="epsilon not set")
    eps = params.epsilon
    wit = []
    worst = None
    for ci, c in enumerate(truth.communities):
        idx = np.asarray(c, dtype=np.int64)
        sub = g.dense()[np.ix_(idx, idx)].astype(np.int64)
        deg = sub.sum(axis=1)
        a = np.asarray(truth.affinities[ci], dtype=float)
        expected = a * (a.sum() - a)
        for j in np.nonzero((deg < (1 - eps) * expected - 1e-9) | (deg > (1 + eps) * expected + 1e-9))[0]:
            if len(wit) < MAX_WITNESSES:
                wit.append({"kind": "degree", "community": ci, "node": int(idx[j]),
                            "degree": int(deg[j]), "expected": float(expected[j])})
        if len(idx) < 2:
            continue
        # closed neighbourhoods, so a clique pair shares the whole clique
        closed = sub + np.eye(len(idx), dtype=np.int64)
        common = closed @ closed
        need = (1 - eps) * truth.alpha_floor(ci) * closed.sum(axis=1)[None, :]
        off = ~np.eye(len(idx), dtype=bool)
        slack = common - need
        low = float(slack[off].min())
        worst = low if worst is None else min(worst, low)
        us, vs = np.nonzero((slack < -1e-9) & off)
        for u, v in zip(us, vs):
            if len(wit) >= MAX_WITNESSES:
                break
            wit.append({"kind": "common", "community": ci, "pair": [int(idx[u]), int(idx[v])],
                        "common": int(common[u, v]), "required": float(need[0, v])})
    return CheckResult("regularity", not wit, witnesses=wit, margin=worst,
                       note="checks the realised graph, not the tail bounds")


def duck_audit(g: Graph, truth: GroundTruth, params: ModelParams, min_size: int = 2) -> CheckResult:
    """Tiny graphs only: list ``(alpha, alpha - eps)``-sets missing from the truth.

    This is a partial check of completeness; it can reveal sets that look
    like communities but were not planted.
    """
    from .oracle import MAX_SUBSET_NODES, enumerate_alpha_epsilon_sets

    if g.n > MAX_SUBSET_NODES or params.epsilon is None:
        return CheckResult("duck_audit", True, applicable=False,
                           note=f"needs n <= {MAX_SUBSET_NODES} and epsilon")
    alpha = min((truth.alpha_floor(i) for i in range(len(truth.communities))), default=1.0)
    if params.alpha is not None:
        alpha = params.alpha
    sets = enumerate_alpha_epsilon_sets(g, alpha, max(0.0, alpha - params.epsilon), min_size)
    planted = set(truth.communities)
    extra = [s for s in sets if s not in planted]
    return CheckResult("duck_audit", not extra, witnesses=[{"set": list(s)} for s in extra],
                       note="partial: enumerates qualifying sets absent from the truth")


def validate(g: Graph, truth: GroundTruth, params: ModelParams, audit: bool = False) -> AssumptionReport:
    checks = {
        "overlap_and_sizes": check_overlap_and_sizes(truth, params, g.n),
        "gap": check_gap(g, truth, params),
        "gamma": check_gamma(g, truth, params),
        "gamma_prime": check_gamma_prime(g, truth, params),
        "distinctness": check_distinctness(g, truth, params),
        "regularity": check_regularity_empirical(g, truth, params),
    }
    if audit:
        checks["duck_audit"] = duck_audit(g, truth, params)
    return AssumptionReport(checks)
