"""Sparse communities via the common-neighbour square graph."""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from .. import kernels
from ..errors import InvalidParamsError
from ..graph import Graph
from .base import DetectionResult, DetectorParams
from .dense import robust_dense_find

# dense-model parameters the square graph satisfies: (alpha, delta, epsilon)
SQUARE_ALPHA = 0.9
SQUARE_DELTA = 1.0
SQUARE_EPSILON = 0.6


def path_threshold(b: float) -> int:
    return math.ceil(b * b / 2 - 1e-9)


def square_transform(g: Graph, b: float, k: int | None = None) -> Graph:
    """Graph on the same nodes joining pairs with at least ``ceil(B^2/2)`` common neighbours."""
    if not b > 0:
        raise InvalidParamsError("B must be > 0")
    if g.n == 0:
        return Graph.from_edges(0, [])
    cc = kernels.common_counts(g.rows)
    np.fill_diagonal(cc, 0)
    adj = cc >= path_threshold(b)
    np.fill_diagonal(adj, False)
    return Graph.from_dense(adj)


def sparse_params(params: DetectorParams) -> DetectorParams:
    d = params.need("d")[0]
    return params.replace(alpha=SQUARE_ALPHA, delta=SQUARE_DELTA, epsilon=SQUARE_EPSILON,
                          gamma=1.0 / (3 * d))


def sparse_pipeline(g: Graph, params: DetectorParams, seed: int,
                    workers: int = 1) -> DetectionResult:
    """Square the graph, then run the robust dense search on it.

    The square graph keeps node ids, so candidates refer to the input graph.
    """
    b, k = params.need("b", "k")
    gp = square_transform(g, b, k)
    res = robust_dense_find(gp, sparse_params(params), seed, workers)
    res.algorithm = "sparse"
    res.params = params.to_dict()
    res.effective = dict(res.effective, square_edges=gp.m, path_threshold=path_threshold(b))
    res.candidates = [dataclasses.replace(c, algorithm="sparse") for c in res.candidates]
    return res
