"""Building blocks shared by the sampling detectors.

An *arena* is the node set a trial works in (a closed neighbourhood, or the
neighbourhood of a seed set). Scans return one row per distinct ``V'``, with the
smallest sample subset ``U`` producing it as witness.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .. import kernels
from ..errors import BudgetExceededError
from ..graph import (_TOL, Graph, NodeSet, RngStream, bernoulli_subsample, count_at_least,
                     count_at_most, count_more_than)

MAX_SAMPLE = 62


def subsample(arena: NodeSet, p: float, rng: RngStream):
    """Bernoulli sample of the arena; ``None`` if over three times its expectation."""
    sample = bernoulli_subsample(arena, p, rng)
    if len(sample) > 3 * len(arena) * p:
        return None
    if len(sample) > MAX_SAMPLE:
        raise BudgetExceededError(
            f"sample of {len(sample)} nodes exceeds the {MAX_SAMPLE}-node scan limit; "
            "lower sample_prob_scale")
    return sample


class Scan:
    """Distinct ``V'`` sets of a scan, as a boolean matrix over the arena.

    Row ``i`` was produced by the sample subset encoded in ``witness[i]``
    (bit ``j`` = ``sample[j]``). Iterating yields ``(V', U)`` in global ids.
    """

    __slots__ = ("arena", "sample", "vsets", "witness")

    def __init__(self, arena, sample, vsets, witness):
        self.arena, self.sample, self.vsets, self.witness = arena, sample, vsets, witness

    @classmethod
    def empty(cls):
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, np.zeros((0, 0), dtype=bool), np.zeros(0, dtype=np.uint64))

    def __len__(self):
        return self.vsets.shape[0]

    def seed(self, i: int) -> tuple:
        w = int(self.witness[i])
        return tuple(int(self.sample[j]) for j in range(self.sample.size) if (w >> j) & 1)

    def __iter__(self):
        for i in range(len(self)):
            yield self.arena[self.vsets[i]], self.seed(i)


@lru_cache(maxsize=4096)
def threshold_table(kind: str, frac: float, upto: int) -> np.ndarray:
    """``table[s]`` = the integer count threshold for set size ``s``, ``0 <= s <= upto``."""
    s = np.arange(upto + 1, dtype=np.float64)
    x = frac * s
    if kind == "at_least":
        t = np.ceil(x - _TOL)
    elif kind == "more_than":
        t = np.floor(x + _TOL) + 1
    elif kind == "at_most":
        t = np.floor(x + _TOL)
    else:
        raise ValueError(kind)
    t = t.astype(np.int64)
    t.setflags(write=False)
    return t


def clique_scan(g: Graph, arena: NodeSet, sample: NodeSet, max_size: int, budget: int,
                maximal_only: bool = False) -> Scan:
    """For each clique ``U`` of ``G(sample)``: arena nodes adjacent to all of ``U``."""
    if max_size < 1 or not sample:
        return Scan.empty()
    arena_arr = np.asarray(arena, dtype=np.int64)
    sample_arr = np.asarray(sample, dtype=np.int64)
    sbits = kernels.local_bits(g.rows, sample_arr, sample_arr, False)
    abits = kernels.local_bits(g.rows, arena_arr, sample_arr, True)
    vsets, wit = kernels.clique_scan(sbits, abits, max_size, budget, maximal_only)
    return Scan(arena_arr, sample_arr, vsets, wit)


def subset_scan(g: Graph, arena: NodeSet, sample: NodeSet, max_size: int, frac: float,
                budget: int) -> Scan:
    """For each subset ``U`` of the sample: arena nodes adjacent to >= ``frac`` of ``U``."""
    if max_size < 1 or not sample:
        return Scan.empty()
    arena_arr = np.asarray(arena, dtype=np.int64)
    sample_arr = np.asarray(sample, dtype=np.int64)
    abits = kernels.local_bits(g.rows, arena_arr, sample_arr, True)
    s = sample_arr.size
    min_count = threshold_table("at_least", frac, s)
    vsets, wit = kernels.subset_scan(abits, s, min(max_size, s), min_count, budget)
    return Scan(arena_arr, sample_arr, vsets, wit)


def words_to_nodes(words: np.ndarray, n: int) -> np.ndarray:
    bits = np.unpackbits(np.ascontiguousarray(words).view(np.uint8), bitorder="little")[:n]
    return np.nonzero(bits)[0].astype(np.int64)


def refine_and_certify(g: Graph, scan: Scan, cut: float, alpha_in: float, alpha_out: float):
    """Batch ``V' -> U' -> U''`` followed by the ``(alpha_in, alpha_out)`` certificate.

    ``U'`` keeps members of ``V'`` with degree >= ``cut`` in ``G(V')``; ``U''``
    is every node with adjacency fraction > ``cut`` into ``U'``. Returns the
    certified ``U''`` sets with the scan row that first produced each.
    """
    if len(scan) == 0:
        return []
    m = scan.arena.size
    words = kernels.refine_dense(g.rows, scan.arena, scan.vsets,
                                 threshold_table("at_least", cut, m),
                                 threshold_table("more_than", cut, m))
    uniq, first = np.unique(words, axis=0, return_index=True)
    order = np.argsort(first)
    uniq, first = uniq[order], first[order]
    nonzero = uniq.any(axis=1)
    uniq, first = np.ascontiguousarray(uniq[nonzero]), first[nonzero]
    if uniq.shape[0] == 0:
        return []
    ok = kernels.certify_sets(g.rows, uniq, threshold_table("at_least", alpha_in, g.n),
                              threshold_table("at_most", alpha_out, g.n))
    return [(words_to_nodes(uniq[i], g.n), int(first[i])) for i in np.nonzero(ok)[0]]


def counts_within(g: Graph, nodes: np.ndarray) -> np.ndarray:
    """Self-inclusive degree of each node inside ``G(nodes)``."""
    return kernels.count_into(g.rows, nodes, g.mask(nodes)) + 1


def degree_filter(g: Graph, nodes: np.ndarray, frac: float) -> np.ndarray:
    """Nodes whose self-inclusive degree in ``G(nodes)`` is >= ``frac * |nodes|``."""
    if nodes.size == 0:
        return nodes
    c = counts_within(g, nodes)
    return nodes[c >= count_at_least(frac, nodes.size)]


def counts_into(g: Graph, base: np.ndarray) -> np.ndarray:
    """Self-inclusive adjacency count of every node into ``base`` (length n)."""
    c = kernels.count_into(g.rows, np.arange(g.n, dtype=np.int64), g.mask(base))
    c[base] += 1
    return c


def extend_more_than(g: Graph, base: np.ndarray, frac: float) -> np.ndarray:
    """All nodes with adjacency fraction into ``base`` strictly above ``frac``."""
    if base.size == 0:
        return base
    c = counts_into(g, base)
    return np.nonzero(c >= count_more_than(frac, base.size))[0]


def certify_dense(g: Graph, s: np.ndarray, alpha: float, alpha_out: float) -> bool:
    if s.size == 0:
        return False
    c = counts_into(g, s)
    inside = np.zeros(g.n, dtype=bool)
    inside[s] = True
    if c[inside].min() < count_at_least(alpha, s.size):
        return False
    out = c[~inside]
    return not (out.size and out.max() > count_at_most(alpha_out, s.size))


def certify_clique(g: Graph, s: np.ndarray, epsilon: float) -> bool:
    """``s`` is a clique and no outsider reaches more than ``1 - epsilon`` of it."""
    return certify_dense(g, s, 1.0, 1.0 - epsilon)


def is_clique(g: Graph, s: np.ndarray) -> bool:
    if s.size == 0:
        return False
    return bool(np.all(counts_within(g, s) == s.size))


def greedy_maximal_clique(g: Graph, base: np.ndarray) -> np.ndarray:
    """Extend clique ``base`` by scanning common neighbours in ascending id order."""
    mask = g.mask(base)
    cur = set(base.tolist())
    adj = g.adj_sets()
    cand = [int(w) for w in np.nonzero(kernels.count_into(
        g.rows, np.arange(g.n, dtype=np.int64), mask) == base.size)[0] if int(w) not in cur]
    for w in cand:
        if all(u in adj[w] for u in cur):
            cur.add(w)
    return np.asarray(sorted(cur), dtype=np.int64)


def trim_low_density(g: Graph, nodes: np.ndarray, remove_below: float, floor: float) -> np.ndarray:
    """Repeatedly drop every node whose density is below ``remove_below``.

    Density of ``v`` is its self-inclusive degree in the current set over the
    set size. Stops once every density is at least ``floor``.
    """
    cur = nodes
    while cur.size:
        c = counts_within(g, cur)
        if c.min() >= count_at_least(floor, cur.size):
            break
        cur = cur[c >= count_at_least(remove_below, cur.size)]
    return cur


def min_density(g: Graph, nodes: np.ndarray) -> float:
    if nodes.size == 0:
        return 0.0
    return float(counts_within(g, nodes).min() / nodes.size)
