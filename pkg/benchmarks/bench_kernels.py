"""Time the compiled kernels against the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each row times one
kernel on the same inputs under both backends and reports the speedup.
"""
import argparse
import timeit

import numpy as np

from overlapcomm import Graph
from overlapcomm.kernels import backends


def _graph(n, p, seed):
    gen = np.random.default_rng(seed)
    a = np.triu(gen.random((n, n)) < p, 1)
    return Graph.from_dense(a | a.T)


def _cases():
    g = _graph(400, 0.2, 0)
    gen = np.random.default_rng(1)
    arena = np.sort(gen.choice(g.n, size=120, replace=False)).astype(np.int64)
    sample = np.sort(gen.choice(arena, size=14, replace=False)).astype(np.int64)
    s = sample.size
    min_count = np.array([0] + [int(np.ceil(0.6 * j)) for j in range(1, s + 1)], dtype=np.int64)
    cut = np.array([int(np.ceil(0.6 * j)) for j in range(arena.size + 1)], dtype=np.int64)
    ext = np.array([int(np.floor(0.6 * j)) + 1 for j in range(arena.size + 1)], dtype=np.int64)
    lo = np.array([int(np.ceil(0.7 * j)) for j in range(g.n + 1)], dtype=np.int64)
    hi = np.array([int(np.floor(0.3 * j)) for j in range(g.n + 1)], dtype=np.int64)
    vsets = gen.random((2000, arena.size)) < 0.5
    clique = _graph(16, 0.7, 2)
    sbits = np.array([sum(1 << int(j) for j in clique.neighbors(i)) for i in range(16)], dtype=np.uint64)
    abits = gen.integers(0, 1 << 16, size=200, dtype=np.uint64)
    words = None

    def run(impl):
        nonlocal words
        rows = impl.pack_rows(g.n, g.indptr, g.indices)
        ab = impl.local_bits(rows, arena, sample, True)
        yield "pack_rows", lambda: impl.pack_rows(g.n, g.indptr, g.indices)
        yield "count_into", lambda: impl.count_into(rows, np.arange(g.n, dtype=np.int64), rows[0])
        yield "subset_scan (s=14)", lambda: impl.subset_scan(ab, s, s, min_count, 10**7)
        yield "clique_scan (s=16)", lambda: impl.clique_scan(sbits, abits, 16, 10**7)
        yield "common_counts (n=400)", lambda: impl.common_counts(rows)
        words = impl.refine_dense(rows, arena, vsets, cut, ext)
        yield "refine_dense (2000 sets)", lambda: impl.refine_dense(rows, arena, vsets, cut, ext)
        yield "certify_sets (2000 sets)", lambda: impl.certify_sets(rows, words, lo, hi)

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    impls = backends()
    run = _cases()
    timings = {}
    for name, impl in impls.items():
        for label, fn in run(impl):
            number = 1
            # pick a loop count giving at least ~0.1 s per measurement
            while timeit.timeit(fn, number=number) < 0.1 and number < 10**5:
                number *= 4
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            timings.setdefault(label, {})[name] = best
    names = list(impls)
    head = f"{'kernel':<26}" + "".join(f"{n + ' (ms)':>16}" for n in names)
    if len(names) == 2:
        head += f"{'speedup':>10}"
    print(head)
    for label, row in timings.items():
        line = f"{label:<26}" + "".join(f"{row[n] * 1e3:>16.3f}" for n in names)
        if len(names) == 2:
            line += f"{row['python'] / row['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
