"""Immutable undirected graphs, node-set primitives and seeded randomness.

Node ids are dense ``0..n-1``. A node set is a sorted tuple of ids. The
adjacency is kept in CSR form (sorted neighbour arrays) and, on first use, as
packed bit rows that the counting kernels operate on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidInputError

NodeSet = tuple  # sorted tuple of node ids

# slack for float thresholds such as 0.525 * 40 landing a hair above 21
_TOL = 1e-9


def count_at_least(frac: float, size: int) -> int:
    """Smallest integer count c with c >= frac * size."""
    return ceil(frac * size - _TOL)


def count_more_than(frac: float, size: int) -> int:
    """Smallest integer count c with c > frac * size."""
    return floor(frac * size + _TOL) + 1


def count_at_most(frac: float, size: int) -> int:
    """Largest integer count c with c <= frac * size."""
    return floor(frac * size + _TOL)


def count_less_than(frac: float, size: int) -> int:
    """Largest integer count c with c < frac * size."""
    return ceil(frac * size - _TOL) - 1


def node_set(nodes: Iterable[int]) -> NodeSet:
    return tuple(sorted(set(int(v) for v in nodes)))


class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Build with :meth:`from_edges`; the constructor takes CSR arrays that are
    assumed valid.
    """

    __slots__ = ("n", "indptr", "indices", "_rows", "_sets")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._rows = None
        self._sets = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], *, strict: bool = False) -> "Graph":
        """Build from an edge iterable.

        Self-loops and out-of-range ids raise :class:`InvalidInputError`.
        Duplicate edges (in either orientation) are merged unless ``strict``.
        """
        n = int(n)
        if n < 0:
            raise InvalidInputError("node count must be >= 0")
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise InvalidInputError("edge endpoint out of range")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise InvalidInputError("self-loops are not allowed")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            key = np.unique(lo * n + hi)
            if strict and key.size != arr.shape[0]:
                raise InvalidInputError("duplicate edge")
            lo, hi = key // n, key % n
            src = np.concatenate([lo, hi])
            dst = np.concatenate([hi, lo])
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64))

    @classmethod
    def from_dense(cls, adj: np.ndarray) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        u, v = np.nonzero(np.triu(adj, 1))
        return cls.from_edges(adj.shape[0], np.stack([u, v], axis=1))

    # basic accessors -----------------------------------------------------

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    def _check(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise InvalidInputError(f"node {v} out of range for n={self.n}")
        return v

    def neighbors(self, v: int) -> np.ndarray:
        v = self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        v = self._check(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    @property
    def rows(self) -> np.ndarray:
        """Packed adjacency bit rows, ``uint64[n, W]``."""
        if self._rows is None:
            rows = kernels.pack_rows(self.n, self.indptr, self.indices)
            rows.setflags(write=False)
            self._rows = rows
        return self._rows

    @property
    def n_words(self) -> int:
        return kernels.words_for(self.n)

    def adj_sets(self) -> list[frozenset]:
        if self._sets is None:
            self._sets = [frozenset(self.neighbors(v).tolist()) for v in range(self.n)]
        return self._sets

    def mask(self, nodes) -> np.ndarray:
        return kernels.mask_from_nodes(np.asarray(nodes, dtype=np.int64), self.n_words)

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=bool)
        e = self.edges()
        out[e[:, 0], e[:, 1]] = True
        out[e[:, 1], e[:, 0]] = True
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# node-set operations -----------------------------------------------------

def _checked_set(g: Graph, s, *, nonempty: bool) -> NodeSet:
    s = node_set(s)
    if nonempty and not s:
        raise InvalidInputError("node set must be nonempty")
    if s and (s[0] < 0 or s[-1] >= g.n):
        raise InvalidInputError("node set has ids out of range")
    return s


def neighborhood(g: Graph, v: int) -> NodeSet:
    """Open neighbourhood of ``v``."""
    return tuple(g.neighbors(v).tolist())


def closed_neighborhood(g: Graph, v: int) -> NodeSet:
    return node_set([v, *g.neighbors(v).tolist()])


def neighborhood_of_set(g: Graph, s) -> NodeSet:
    """``s`` together with every neighbour of a member of ``s``."""
    s = _checked_set(g, s, nonempty=True)
    parts = [np.asarray(s, dtype=np.int64)] + [g.neighbors(u) for u in s]
    return tuple(np.unique(np.concatenate(parts)).tolist())


def common_neighbor_count(g: Graph, u: int, v: int) -> int:
    if int(u) == int(v):
        raise InvalidInputError("common_neighbor_count needs two distinct nodes")
    a, b = g.neighbors(u), g.neighbors(v)
    return int(np.intersect1d(a, b, assume_unique=True).size)


def adjacency_count(g: Graph, v: int, s) -> int:
    """``|({v} | N(v)) & s|``: a node counts as adjacent to itself."""
    s = np.asarray(node_set(s), dtype=np.int64)
    nb = g.neighbors(v)
    hits = int(np.isin(s, nb, assume_unique=True).sum())
    return hits + int(np.any(s == int(v)))


def adjacency_fraction(g: Graph, v: int, s) -> Fraction:
    s = _checked_set(g, s, nonempty=True)
    return Fraction(adjacency_count(g, v, s), len(s))


def membership_counts(g: Graph, s) -> np.ndarray:
    """Self-inclusive adjacency count of every node into ``s`` (length n)."""
    s = np.asarray(s, dtype=np.int64)
    counts = kernels.count_into(g.rows, np.arange(g.n, dtype=np.int64), g.mask(s))
    if s.size:
        counts[s] += 1
    return counts


def is_alpha_epsilon_set(g: Graph, s, alpha: float, alpha_out: float) -> bool:
    """Every member has fraction >= ``alpha``; every outsider <= ``alpha_out``."""
    if not 0 <= alpha_out <= alpha <= 1:
        raise InvalidInputError("need 0 <= alpha_out <= alpha <= 1")
    s = _checked_set(g, s, nonempty=True)
    return _certify_counts(membership_counts(g, s), s, alpha, alpha_out)


def _certify_counts(counts: np.ndarray, s: NodeSet, alpha: float, alpha_out: float) -> bool:
    size = len(s)
    inside = np.zeros(counts.size, dtype=bool)
    inside[list(s)] = True
    if counts[inside].min() < count_at_least(alpha, size):
        return False
    outside = counts[~inside]
    return not (outside.size and outside.max() > count_at_most(alpha_out, size))


def induced_subgraph(g: Graph, s) -> tuple[Graph, NodeSet]:
    """Subgraph on ``s`` relabelled to ``0..|s|-1``; ``mapping[i]`` is the parent id."""
    s = _checked_set(g, s, nonempty=False)
    if not s:
        return Graph.from_edges(0, []), ()
    local = {v: i for i, v in enumerate(s)}
    sset = set(s)
    edges = [(local[u], local[w]) for u in s for w in g.neighbors(u).tolist()
             if u < w and w in sset]
    return Graph.from_edges(len(s), edges), s


# randomness --------------------------------------------------------------

@dataclass
class RngStream:
    """Seeded random stream addressed by ``(master_seed, stream_index)``.

    ``stream_index`` is a tuple so that children can be derived
    hierarchically (run -> level -> trial) without coordination.
    """

    master_seed: int
    stream_index: tuple = ()
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.stream_index, int):
            self.stream_index = (self.stream_index,)
        self.stream_index = tuple(int(i) for i in self.stream_index)
        self.master_seed = int(self.master_seed) & 0xFFFFFFFFFFFFFFFF

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_index)
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def child(self, *index: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_index + tuple(index))


def bernoulli_subsample(s, p: float, rng: RngStream | np.random.Generator) -> NodeSet:
    """Keep each member of ``s`` independently with probability ``p``.

    One uniform is drawn per member, in ascending id order.
    """
    if not 0 <= p <= 1:
        raise InvalidInputError("probability must lie in [0, 1]")
    s = node_set(s)
    gen = rng.gen if isinstance(rng, RngStream) else rng
    draws = gen.random(len(s))
    return tuple(v for v, x in zip(s, draws) if x < p)
