import itertools

import numpy as np
import pytest

from overlapcomm import Graph

ACCEPTANCE_LINES: dict = {}


def complete(n):
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def bipartite(a, b):
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def disjoint_union(*graphs):
    edges, off = [], 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges().tolist())
        off += g.n
    return Graph.from_edges(off, edges)


def gnp(n, p, seed):
    gen = np.random.default_rng(seed)
    a = np.triu(gen.random((n, n)) < p, 1)
    return Graph.from_dense(a | a.T)


def planted(n, blocks, p_in, p_out, seed):
    """Random graph with dense blocks; returns the graph and the sorted blocks."""
    gen = np.random.default_rng(seed)
    perm = gen.permutation(n)
    a = np.triu(gen.random((n, n)) < p_out, 1)
    comms, start = [], 0
    for size in blocks:
        idx = np.sort(perm[start:start + size])
        start += size
        block = np.triu(gen.random((size, size)) < p_in, 1)
        a[np.ix_(idx, idx)] = block
        comms.append(tuple(int(x) for x in idx))
    a = np.triu(a, 1)
    return Graph.from_dense(a | a.T), comms


@pytest.fixture
def k5():
    return complete(5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
