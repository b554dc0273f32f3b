"""Pure numpy implementations of the bitset kernels.

Every function here has a twin in ``_bitset.pyx`` with the same signature and
bit-identical output. Adjacency rows are ``uint64[n, W]`` arrays where bit
``j % 64`` of word ``j // 64`` in row ``i`` is set iff ``(i, j)`` is an edge.
"""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .errors import BudgetExceededError

# distinct sets times arena size allowed in a scan result
SCAN_CELL_LIMIT = 1 << 27

_CHUNK = 8192


def words_for(n):
    return max(1, (n + 63) // 64)


def pack_rows(n, indptr, indices):
    w = words_for(n)
    rows = np.zeros((n, w), dtype=np.uint64)
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size:
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
        bits = np.left_shift(np.uint64(1), (indices & 63).astype(np.uint64))
        np.bitwise_or.at(rows, (src, indices >> 6), bits)
    return rows


def mask_from_nodes(nodes, n_words):
    mask = np.zeros(n_words, dtype=np.uint64)
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size:
        bits = np.left_shift(np.uint64(1), (nodes & 63).astype(np.uint64))
        np.bitwise_or.at(mask, nodes >> 6, bits)
    return mask


def count_into(rows, nodes, mask):
    """Number of neighbours of each ``nodes[i]`` inside ``mask``."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bitwise_count(rows[nodes] & mask).sum(axis=1, dtype=np.int64)


def local_bits(rows, arena, sample, self_bit):
    """Bitmask over sample positions of each arena node's neighbours.

    ``len(sample) <= 64``. With ``self_bit`` an arena node that is itself
    sample position ``j`` also gets bit ``j``.
    """
    arena = np.asarray(arena, dtype=np.int64)
    sample = np.asarray(sample, dtype=np.int64)
    out = np.zeros(arena.size, dtype=np.uint64)
    if sample.size > 64:
        raise ValueError("sample larger than 64 nodes")
    for j, s in enumerate(sample):
        word = int(s) >> 6
        bit = np.uint64(1) << np.uint64(int(s) & 63)
        hit = (rows[arena, word] & bit) != 0
        if self_bit:
            hit |= arena == s
        out[hit] |= np.uint64(1) << np.uint64(j)
    return out


def _popcount_u64(x):
    return np.bitwise_count(x).astype(np.int64)


def _check_cells(count, m):
    if count * max(m, 1) > SCAN_CELL_LIMIT:
        raise BudgetExceededError(
            f"scan produced {count} distinct sets over {m} arena nodes; lower sample_prob_scale")


def _unique_min(vsets, masks, seen):
    # keeps, per distinct set, the smallest mask seen so far
    if vsets.shape[0] == 0:
        return
    packed = np.packbits(vsets, axis=1)
    order = np.argsort(masks, kind="stable")
    _, first = np.unique(packed[order], axis=0, return_index=True)
    for i in order[first]:
        key = packed[i].tobytes()
        mask = int(masks[i])
        if key not in seen or mask < seen[key][0]:
            seen[key] = (mask, vsets[i].copy())
    _check_cells(len(seen), vsets.shape[1])


def _finish(seen, m):
    if not seen:
        return np.zeros((0, m), dtype=bool), np.zeros(0, dtype=np.uint64)
    items = sorted(seen.values(), key=lambda t: t[0])
    vsets = np.stack([v for _, v in items])
    wit = np.array([w for w, _ in items], dtype=np.uint64)
    return vsets, wit


def subset_scan(arena_bits, s, max_size, min_count, budget):
    """Distinct threshold sets over all nonempty subsets of ``s`` sample nodes.

    For each subset ``U`` (a bitmask, ``|U| <= max_size``) the set is
    ``{i : popcount(arena_bits[i] & U) >= min_count[|U|]}``. Returns the
    distinct sets as a bool matrix together with the smallest mask producing
    each, sorted by that mask.
    """
    arena_bits = np.asarray(arena_bits, dtype=np.uint64)
    min_count = np.asarray(min_count, dtype=np.int64)
    m = arena_bits.size
    if s > 62:
        raise BudgetExceededError(f"subset scan over {s} sample nodes")
    total = 1 << s
    if total - 1 > budget:
        n_sub = sum(comb(s, j) for j in range(1, min(max_size, s) + 1))
        if n_sub > budget:
            raise BudgetExceededError(
                f"subset scan would visit {n_sub} subsets (budget {budget})")
    seen = {}
    for masks in _mask_chunks(s, max_size):
        sizes = _popcount_u64(masks)
        counts = np.bitwise_count(arena_bits[None, :] & masks[:, None])
        vsets = counts >= min_count[sizes][:, None]
        _unique_min(vsets, masks, seen)
    return _finish(seen, m)


def _mask_chunks(s, max_size):
    total = 1 << s
    if max_size >= s or total <= (1 << 20):
        for start in range(1, total, _CHUNK):
            masks = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
            masks = masks[_popcount_u64(masks) <= max_size]
            if masks.size:
                yield masks
        return
    buf = []
    for j in range(1, max_size + 1):
        for combo in combinations(range(s), j):
            buf.append(sum(1 << b for b in combo))
            if len(buf) == _CHUNK:
                yield np.array(buf, dtype=np.uint64)
                buf = []
    if buf:
        yield np.array(buf, dtype=np.uint64)


def enumerate_cliques(sample_bits, max_size, budget, maximal_only=False):
    """Nonempty cliques of size <= ``max_size`` as local bitmasks.

    With ``maximal_only`` only cliques that no sample vertex extends are kept.
    """
    s = len(sample_bits)
    nbrs = [int(b) for b in sample_bits]
    out = []
    visited = 0

    def extend(clique, size, cand, common):
        nonlocal visited
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            cand ^= low
            c = clique | low
            com = common & nbrs[j]
            visited += 1
            if visited > budget:
                raise BudgetExceededError(
                    f"clique enumeration exceeded budget {budget}")
            if not maximal_only or com == 0:
                out.append(c)
            if size + 1 < max_size:
                # only higher-indexed vertices, so every clique appears once
                extend(c, size + 1, cand & nbrs[j], com)

    if max_size >= 1 and s:
        full = (1 << s) - 1
        extend(0, 0, full, full)
    return out


def clique_scan(sample_bits, arena_bits, max_size, budget, maximal_only=False):
    """Distinct common-neighbour sets over the cliques of the sample graph.

    For each clique ``U`` the set is ``{i : arena_bits[i] contains U}``.
    Output layout matches :func:`subset_scan`.
    """
    arena_bits = np.asarray(arena_bits, dtype=np.uint64)
    m = arena_bits.size
    cliques = enumerate_cliques(sample_bits, max_size, budget, maximal_only)
    cliques.sort()
    seen = {}
    arr = np.array(cliques, dtype=np.uint64)
    for start in range(0, arr.size, _CHUNK):
        masks = arr[start:start + _CHUNK]
        vsets = (arena_bits[None, :] & masks[:, None]) == masks[:, None]
        _unique_min(vsets, masks, seen)
    return _finish(seen, m)


def common_counts(rows):
    """``out[u, v] = |N(u) & N(v)|``; the diagonal holds degrees."""
    n = rows.shape[0]
    out = np.zeros((n, n), dtype=np.int32)
    for u in range(n):
        out[u] = np.bitwise_count(rows & rows[u]).sum(axis=1)
    return out


def _dense_adjacency(rows):
    n = rows.shape[0]
    bits = np.unpackbits(rows.view(np.uint8), axis=1, bitorder="little")[:, :n]
    return bits.astype(np.float32) + np.eye(n, dtype=np.float32)


def _pack(bool_rows, n_words):
    r, n = bool_rows.shape
    padded = np.zeros((r, n_words * 64), dtype=bool)
    padded[:, :n] = bool_rows
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def refine_dense(rows, arena, vsets, core_min, ext_min):
    """For each ``V'`` row: core ``U'`` (members of ``V'`` with degree in ``V'``
    at least ``core_min[|V'|]``), then ``U''`` = nodes with at least
    ``ext_min[|U'|]`` self-inclusive neighbours in ``U'``. Rows are packed words."""
    n, w = rows.shape
    arena = np.asarray(arena, dtype=np.int64)
    vsets = np.asarray(vsets, dtype=bool)
    core_min = np.asarray(core_min, dtype=np.int64)
    ext_min = np.asarray(ext_min, dtype=np.int64)
    adj = _dense_adjacency(rows)
    a_in = adj[np.ix_(arena, arena)]
    a_out = adj[arena, :]
    out = np.zeros((vsets.shape[0], w), dtype=np.uint64)
    for start in range(0, vsets.shape[0], _CHUNK):
        v = vsets[start:start + _CHUNK]
        deg = v.astype(np.float32) @ a_in
        size = v.sum(axis=1)
        u = v & (deg >= core_min[size][:, None])
        usize = u.sum(axis=1)
        ext = u.astype(np.float32) @ a_out
        keep = (ext >= ext_min[usize][:, None]) & (usize > 0)[:, None]
        out[start:start + _CHUNK] = _pack(keep, w)
    return out


def certify_sets(rows, sets, in_min, out_max):
    """Members need ``>= in_min[size]`` and outsiders ``<= out_max[size]``
    self-inclusive neighbours in the set."""
    n = rows.shape[0]
    sets = np.asarray(sets, dtype=np.uint64)
    in_min = np.asarray(in_min, dtype=np.int64)
    out_max = np.asarray(out_max, dtype=np.int64)
    adj = _dense_adjacency(rows)
    res = np.zeros(sets.shape[0], dtype=bool)
    for start in range(0, sets.shape[0], _CHUNK):
        block = sets[start:start + _CHUNK]
        s = np.unpackbits(block.view(np.uint8), axis=1, bitorder="little")[:, :n].astype(bool)
        size = s.sum(axis=1)
        c = s.astype(np.float32) @ adj
        ok_in = np.where(s, c >= in_min[size][:, None], True).all(axis=1)
        ok_out = np.where(s, True, c <= out_max[size][:, None]).all(axis=1)
        res[start:start + _CHUNK] = ok_in & ok_out & (size > 0)
    return res
