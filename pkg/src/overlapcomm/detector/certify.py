"""Independent re-check of emitted candidates."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..graph import Graph, count_at_least, count_at_most
from . import steps
from .base import CandidateSet, DetectorParams
from .sparse import sparse_params, square_transform

CLIQUE_ALGOS = {"clique", "anysize-clique"}
DENSE_ALGOS = {"dense", "robust", "sparse"}
RELAXED_ALGOS = {"gap-clique", "gap-dense"}


@dataclass
class Certificate:
    algorithm: str
    size: int
    is_clique: bool
    min_internal_density: Fraction
    max_outside_fraction: Fraction
    dense_verdict: Optional[bool]
    required: bool

    def to_json_dict(self) -> dict:
        out = asdict(self)
        for key in ("min_internal_density", "max_outside_fraction"):
            f = out[key]
            out[key] = [f.numerator, f.denominator]
        return out


def _fractions(g: Graph, members: np.ndarray):
    c = steps.counts_into(g, members)
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    size = members.size
    lo = Fraction(int(c[inside].min()), size)
    out = c[~inside]
    hi = Fraction(int(out.max()) if out.size else 0, size)
    return lo, hi


def certify_candidate(g: Graph, c: CandidateSet, params: DetectorParams) -> Certificate:
    """Measure ``c`` and evaluate the acceptance rule of the algorithm that emitted it.

    ``required`` is the verdict that algorithm needed before emitting.
    For the sparse pipeline the check runs on the square graph.
    """
    members = np.asarray(c.members, dtype=np.int64)
    algo = c.algorithm
    graph, p = g, params
    if algo == "sparse":
        graph, p = square_transform(g, params.b, params.k), sparse_params(params)
    lo, hi = _fractions(graph, members)
    size = members.size
    clique = lo == 1
    dense_verdict = None
    if p.alpha is not None and p.epsilon is not None:
        a, e = p.alpha, p.epsilon
        dense_verdict = steps.certify_dense(graph, members, a - e / 8, a - 7 * e / 8)
    if algo in CLIQUE_ALGOS:
        required = clique and hi * size <= count_at_most(1 - p.epsilon, size)
    elif algo in DENSE_ALGOS:
        required = bool(dense_verdict)
    elif algo == "anysize-dense":
        a = c.alpha_used
        required = steps.certify_dense(graph, members, a, a - p.epsilon / 2)
    elif algo in RELAXED_ALGOS:
        required = lo * size >= count_at_least(1 - p.epsilon if algo == "gap-clique"
                                               else p.alpha - p.epsilon, size)
    else:
        raise ValueError(f"unknown algorithm tag {algo!r}")
    return Certificate(algo, int(size), bool(clique), lo, hi, dense_verdict, bool(required))
