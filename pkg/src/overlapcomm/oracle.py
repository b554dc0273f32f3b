"""Brute-force reference answers for small graphs.

These routines share no code path with the detectors' bitset kernels, so
they can serve as independent checks.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import BudgetExceededError, InvalidInputError
from .graph import Graph, NodeSet, count_at_least, count_at_most

DEFAULT_BUDGET = 10**7
MAX_SUBSET_NODES = 20


def enumerate_maximal_cliques(g: Graph, min_size: int = 1,
                              budget: int = DEFAULT_BUDGET) -> list[NodeSet]:
    """All maximal cliques with at least ``min_size`` nodes, sorted.

    Bron-Kerbosch with Tomita pivoting; ``budget`` bounds the number of
    recursive calls.
    """
    adj = g.adj_sets()
    out: list[NodeSet] = []
    calls = 0

    def expand(r: list, p: set, x: set):
        nonlocal calls
        calls += 1
        if calls > budget:
            raise BudgetExceededError(f"maximal-clique enumeration exceeded {budget} calls")
        if not p and not x:
            if len(r) >= min_size:
                out.append(tuple(sorted(r)))
            return
        if len(r) + len(p) < min_size:
            return
        pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    expand([], set(range(g.n)), set())
    return sorted(out)


def _closed_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int32)
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1
    a[np.arange(g.n), np.arange(g.n)] = 1
    return a


def enumerate_alpha_epsilon_sets(g: Graph, alpha: float, alpha_out: float, min_size: int = 1,
                                 budget: int = DEFAULT_BUDGET) -> list[NodeSet]:
    """Every node set of size >= ``min_size`` that is an ``(alpha, alpha_out)``-set.

    Exhaustive over all ``2^n`` subsets, so ``n`` is limited to 20.
    """
    if not 0 <= alpha_out <= alpha <= 1:
        raise InvalidInputError("need 0 <= alpha_out <= alpha <= 1")
    n = g.n
    if n > MAX_SUBSET_NODES:
        raise BudgetExceededError(f"exhaustive subset scan limited to {MAX_SUBSET_NODES} nodes")
    if 2**n > budget:
        raise BudgetExceededError(f"2^{n} subsets exceed budget {budget}")
    if n == 0:
        return []
    a = _closed_adjacency(g)
    found = []
    lo = max(1, min_size)
    for size in range(lo, n + 1):
        need_in = count_at_least(alpha, size)
        max_out = count_at_most(alpha_out, size)
        combos = np.array(list(combinations(range(n), size)), dtype=np.int64)
        for start in range(0, combos.shape[0], 4096):
            block = combos[start:start + 4096]
            member = np.zeros((block.shape[0], n), dtype=bool)
            member[np.arange(block.shape[0])[:, None], block] = True
            counts = member.astype(np.int32) @ a
            ok_in = np.where(member, counts >= need_in, True).all(axis=1)
            ok_out = np.where(member, True, counts <= max_out).all(axis=1)
            for row in block[ok_in & ok_out]:
                found.append(tuple(int(x) for x in row))
    return sorted(found)


def count_length2_paths_matrix(g: Graph) -> np.ndarray:
    """``out[u, v]`` = number of length-2 paths between ``u`` and ``v``.

    Each node ``w`` adds one path to every pair of its neighbours; the
    diagonal is zeroed.
    """
    if g.n > 2000:
        raise BudgetExceededError("length-2 path matrix limited to 2000 nodes")
    out = np.zeros((g.n, g.n), dtype=np.int64)
    for w in range(g.n):
        nb = g.neighbors(w)
        if nb.size > 1:
            out[np.ix_(nb, nb)] += 1
    np.fill_diagonal(out, 0)
    return out
