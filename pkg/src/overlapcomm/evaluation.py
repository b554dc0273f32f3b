"""Scoring detector output against planted communities."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

from .detector import ALGORITHMS, DetectorParams
from .generator import AmbientSpec, GroundTruth, ModelParams, generate
from .graph import Graph, count_at_least

DEFAULT_THRESHOLD = 0.95
_Z95 = NormalDist().inv_cdf(0.975)


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def relaxed_match(candidate, truth_c, g: Graph, epsilon: float) -> bool:
    """``candidate`` keeps ``(1 - eps)`` of ``truth_c`` and every member reaches
    ``(1 - eps)`` of ``candidate`` (self-inclusive)."""
    cand = sorted(set(int(x) for x in candidate))
    if not cand:
        return False
    truth_set = set(truth_c)
    if len(truth_set & set(cand)) < count_at_least(1 - epsilon, len(truth_set)):
        return False
    need = count_at_least(1 - epsilon, len(cand))
    adj = g.adj_sets()
    cset = set(cand)
    return all(len(adj[v] & cset) + 1 >= need for v in cand)


@dataclass
class CommunityMatch:
    truth_index: int
    best_candidate: Optional[list]
    jaccard: float
    exact: bool
    relaxed: Optional[bool] = None


@dataclass
class MatchReport:
    communities: list
    precision: float
    recall: float
    f1: float
    exact_rate: float
    mean_jaccard: float
    threshold: float
    n_found: int
    n_truth: int
    flags: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return asdict(self)


def match_communities(found: Sequence, truth: Sequence, jaccard_threshold: float = DEFAULT_THRESHOLD,
                      g: Optional[Graph] = None, epsilon: Optional[float] = None) -> MatchReport:
    """Match each planted community to its best candidate by Jaccard.

    Ties go to the lexicographically smaller candidate. A candidate counts as
    matched when some planted community reaches the threshold with it. With
    nothing found, precision is 1 by convention and the report is flagged.
    """
    found_sets = [tuple(sorted(set(int(x) for x in c))) for c in found]
    found_sets = sorted(set(found_sets))
    truth_sets = [tuple(sorted(set(int(x) for x in c))) for c in truth]
    flags = []
    rows = []
    matched_found = set()
    for ti, t in enumerate(truth_sets):
        best, best_j = None, -1.0
        tset = set(t)
        for c in found_sets:
            j = jaccard(tset, c)
            if j > best_j or (j == best_j and best is not None and c < best):
                best, best_j = c, j
        for c in found_sets:
            if jaccard(tset, c) >= jaccard_threshold:
                matched_found.add(c)
        relaxed = None
        if g is not None and epsilon is not None:
            relaxed = any(relaxed_match(c, t, g, epsilon) for c in found_sets)
        rows.append(CommunityMatch(ti, list(best) if best is not None else None,
                                   max(best_j, 0.0), best == t, relaxed))
    if found_sets:
        precision = len(matched_found) / len(found_sets)
    else:
        precision = 1.0
        flags.append("empty_found_precision_is_1")
    if truth_sets:
        recall = sum(r.jaccard >= jaccard_threshold for r in rows) / len(truth_sets)
        exact_rate = sum(r.exact for r in rows) / len(truth_sets)
        mean_j = float(np.mean([r.jaccard for r in rows]))
    else:
        recall, exact_rate, mean_j = 1.0, 1.0, 1.0
        flags.append("empty_truth")
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return MatchReport(rows, precision, recall, f1, exact_rate, mean_j, jaccard_threshold,
                       len(found_sets), len(truth_sets), flags)


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class InstanceSpec:
    """What to run ``recovery_rate`` on.

    With ``regenerate`` every trial seed also seeds a fresh instance;
    otherwise one instance (``graph``/``truth``, or generated from
    ``instance_seed``) is reused and only the detector seed varies.
    """

    model: str
    model_params: ModelParams
    detector_params: DetectorParams
    ambient: AmbientSpec = field(default_factory=AmbientSpec)
    regenerate: bool = True
    instance_seed: int = 0
    graph: Optional[Graph] = None
    truth: Optional[GroundTruth] = None

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceSpec":
        amb = d.get("ambient", "none")
        amb = AmbientSpec(**amb) if isinstance(amb, dict) else AmbientSpec(amb)
        mp = ModelParams(**d.get("model_params", {}))
        if amb.strategy == "uniform" and amb.q == 0:
            amb.q = mp.ambient_q
        if amb.strategy == "gap-stress" and amb.stress_nodes == 0:
            amb.stress_nodes = mp.stress_nodes
        return cls(model=d["model"], model_params=mp,
                   detector_params=DetectorParams(**d.get("detector_params", {})),
                   ambient=amb, regenerate=bool(d.get("regenerate", True)),
                   instance_seed=int(d.get("instance_seed", 0)))

    def instance(self, seed: int) -> tuple[Graph, GroundTruth]:
        if self.graph is not None and self.truth is not None:
            return self.graph, self.truth
        g, truth, _ = generate(self.model_params, self.model, self.ambient,
                               seed if self.regenerate else self.instance_seed)
        if not self.regenerate:
            self.graph, self.truth = g, truth
        return g, truth


def _one_trial(spec: InstanceSpec, algorithm: str, seed: int, workers: int):
    g, truth = spec.instance(seed)
    res = ALGORITHMS[algorithm](g, spec.detector_params, seed, workers)
    found = set(res.member_sets)
    eps = spec.detector_params.epsilon
    exact = [c in found for c in truth.communities]
    relaxed = [any(relaxed_match(f, c, g, eps) for f in found) if eps is not None else False
               for c in truth.communities]
    return {"exact": exact, "relaxed": relaxed, "candidates": len(found)}


def recovery_rate(spec: InstanceSpec, algorithm: str, trials: int, base_seed: int = 0,
                  workers: int = 1) -> dict:
    """Per-community exact and relaxed recovery frequencies over seeded trials.

    Trial ``i`` uses seed ``base_seed + i``; ``per_trial[i]`` holds its
    outcome. Results depend only on the instance description, the algorithm and the seeds.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if not spec.regenerate:
        spec.instance(spec.instance_seed)
    seeds = [base_seed + i for i in range(trials)]
    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _one_trial(spec, algorithm, s, 1), seeds))
    else:
        rows = [_one_trial(spec, algorithm, s, 1) for s in seeds]
    n_comm = max((len(r["exact"]) for r in rows), default=0)
    table = []
    for ci in range(n_comm):
        ex = sum(r["exact"][ci] for r in rows if ci < len(r["exact"]))
        rx = sum(r["relaxed"][ci] for r in rows if ci < len(r["relaxed"]))
        table.append({"community": ci, "trials": trials,
                      "exact": ex, "exact_rate": ex / trials if trials else 0.0,
                      "exact_ci95": list(wilson_interval(ex, trials)),
                      "relaxed": rx, "relaxed_rate": rx / trials if trials else 0.0,
                      "relaxed_ci95": list(wilson_interval(rx, trials))})
    return {"algorithm": algorithm, "base_seed": base_seed, "trials": trials,
            "communities": table, "per_trial": rows}


def render_table(result: dict) -> str:
    """Aligned text rendering of a :func:`recovery_rate` result."""
    head = f"{'community':>9}  {'exact':>11}  {'95% CI':>15}  {'relaxed':>11}  {'95% CI':>15}"
    lines = [f"algorithm={result['algorithm']} trials={result['trials']} "
             f"base_seed={result['base_seed']}", head]
    for row in result["communities"]:
        lo, hi = row["exact_ci95"]
        rlo, rhi = row["relaxed_ci95"]
        lines.append(f"{row['community']:>9}  {row['exact']:>4}/{row['trials']:<4} "
                     f"{row['exact_rate']:.2f}  [{lo:.3f}, {hi:.3f}]  "
                     f"{row['relaxed']:>4}/{row['trials']:<4} {row['relaxed_rate']:.2f}  "
                     f"[{rlo:.3f}, {rhi:.3f}]")
    lines.append("")
    lines.append(f"{'seed':>9}  exact  relaxed  candidates")
    for i, r in enumerate(result["per_trial"]):
        ex = "".join("1" if x else "0" for x in r["exact"])
        rx = "".join("1" if x else "0" for x in r["relaxed"])
        lines.append(f"{result['base_seed'] + i:>9}  {ex:>5}  {rx:>7}  {r['candidates']:>10}")
    return "\n".join(lines) + "\n"
