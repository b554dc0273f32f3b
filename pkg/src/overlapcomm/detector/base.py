"""Parameter records, result types and the trial/merge machinery shared by all detectors."""
from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Optional

import numpy as np

from ..errors import BudgetExceededError, InvalidParamsError
from ..graph import Graph, NodeSet, RngStream

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


@dataclass
class DetectorParams:
    """Model symbols read by the detectors plus effort knobs.

    Symbols follow the model: ``k`` max community size, ``m`` min size,
    ``d`` max memberships, ``delta`` size ratio, ``epsilon`` gap, ``gamma``
    community-edge fraction, ``alpha`` density, ``alpha_min`` density floor,
    ``beta`` distinctness, ``b`` sparse constant.
    """

    k: Optional[int] = None
    m: Optional[int] = None
    d: Optional[int] = None
    delta: Optional[float] = None
    epsilon: Optional[float] = None
    gamma: Optional[float] = None
    alpha: Optional[float] = None
    alpha_min: Optional[float] = None
    beta: Optional[float] = None
    b: Optional[float] = None
    sample_prob_scale: float = 1.0
    trial_count_scale: float = 1.0
    robust_p_constant: float = 1.0
    t_override: Optional[int] = None
    use_maximal_cliques: bool = False
    epsilon_prime: Optional[float] = None
    # cap on the T-subsets S tried per starting node; None enumerates all
    max_seed_sets: Optional[int] = None
    # any-size clique: restrict V' to the ledger-filtered neighbourhood (True) or use N[v]
    restricted_scope: bool = True
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        for name in ("sample_prob_scale", "trial_count_scale", "robust_p_constant"):
            if not getattr(self, name) > 0:
                raise InvalidParamsError(f"{name} must be > 0")
        if self.t_override is not None and self.t_override < 1:
            raise InvalidParamsError("t_override must be >= 1")
        if self.max_seed_sets is not None and self.max_seed_sets < 1:
            raise InvalidParamsError("max_seed_sets must be >= 1")

    def need(self, *names: str):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise InvalidParamsError(f"missing parameter(s): {', '.join(missing)}")
        return [getattr(self, n) for n in names]

    def replace(self, **changes) -> "DetectorParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class CandidateSet:
    members: NodeSet
    algorithm: str
    trial_index: int
    starting_node: Optional[int] = None
    seed_set: Optional[NodeSet] = None
    alpha_used: Optional[float] = None
    # set by the gap-relaxed variants: smallest internal density of the set
    min_density: Optional[float] = None

    def provenance_key(self):
        return (self.trial_index, self.seed_set or (), self.starting_node or -1)


@dataclass
class DetectionResult:
    algorithm: str
    seed: int
    params: dict
    candidates: list
    trials_run: int = 0
    trials_skipped: int = 0
    wall_time_ms: float = 0.0
    effective: dict = field(default_factory=dict)

    @property
    def member_sets(self) -> list[NodeSet]:
        return [c.members for c in self.candidates]

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "params": self.params,
            "effective": self.effective,
            "candidates": [list(c.members) for c in self.candidates],
            "stats": {
                "trials_run": self.trials_run,
                "trials_skipped": self.trials_skipped,
                "wall_time_ms": self.wall_time_ms,
            },
        }


@dataclass
class TrialOutcome:
    candidates: list
    ran: int = 1
    skipped: int = 0


def merge_candidates(found: Iterable[CandidateSet]) -> list[CandidateSet]:
    """Deduplicate by member set and sort; the earliest provenance wins.

    Independent of input order, so parallel schedules give the same output.
    """
    best: dict = {}
    for c in found:
        cur = best.get(c.members)
        if cur is None or c.provenance_key() < cur.provenance_key():
            best[c.members] = c
    return [best[k] for k in sorted(best)]


def run_trials(fn: Callable, items: list, workers: int = 1) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda it: fn(*it), items))


def finish(algorithm: str, seed: int, params: DetectorParams, outcomes: list,
           t0: float, effective: dict) -> DetectionResult:
    cands = merge_candidates(c for o in outcomes for c in o.candidates)
    res = DetectionResult(
        algorithm=algorithm, seed=seed, params=params.to_dict(), candidates=cands,
        trials_run=sum(o.ran for o in outcomes),
        trials_skipped=sum(o.skipped for o in outcomes),
        wall_time_ms=round((time.perf_counter() - t0) * 1000.0, 3),
        effective=effective,
    )
    log.info("%s: %d candidates, %d trials (%d skipped), effective %s", algorithm,
             len(cands), res.trials_run, res.trials_skipped, effective)
    return res


def empty_result(algorithm: str, seed: int, params: DetectorParams, effective=None) -> DetectionResult:
    return DetectionResult(algorithm, seed, params.to_dict(), [], effective=effective or {})


def checked_probability(p: float, formula: str) -> float:
    if not (p > 0 and math.isfinite(p)):
        raise InvalidParamsError(f"sample probability {formula} = {p:.6g} is not positive")
    if p > 1:
        raise InvalidParamsError(
            f"sample probability {formula} = {p:.6g} exceeds 1; lower sample_prob_scale")
    return p


def start_count(base: float, params: DetectorParams) -> int:
    return max(1, math.ceil(base * params.trial_count_scale - 1e-9))


def draw_starts(n: int, count: int, rng: RngStream) -> np.ndarray:
    return rng.gen.integers(0, n, size=count)


def seed_sets(pool: NodeSet, t: int, params: DetectorParams, rng: RngStream) -> list[NodeSet]:
    """All ``t``-subsets of ``pool``, or a uniform sample of ``max_seed_sets`` of them."""
    total = math.comb(len(pool), t)
    if total == 0:
        return []
    cap = params.max_seed_sets
    if cap is None or total <= cap:
        if total > params.budget:
            raise BudgetExceededError(
                f"{total} seed sets of size {t} exceed budget {params.budget}; set max_seed_sets")
        return list(combinations(pool, t))
    pool_arr = np.asarray(pool, dtype=np.int64)
    chosen: set = set()
    gen = rng.gen
    while len(chosen) < cap:
        pick = np.sort(gen.choice(pool_arr.size, size=t, replace=False))
        chosen.add(tuple(int(pool_arr[i]) for i in pick))
    return sorted(chosen)
