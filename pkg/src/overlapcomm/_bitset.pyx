# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t

from .errors import BudgetExceededError

# distinct sets times arena size allowed in a scan result
SCAN_CELL_LIMIT = 1 << 27

cnp.import_array()

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil


def words_for(n):
    return max(1, (n + 63) // 64)


def pack_rows(Py_ssize_t n, indptr, indices):
    cdef Py_ssize_t w = words_for(n)
    rows_arr = np.zeros((n, w), dtype=np.uint64)
    cdef uint64_t[:, ::1] rows = rows_arr
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t i, k
    cdef int64_t j
    with nogil:
        for i in range(n):
            for k in range(ip[i], ip[i + 1]):
                j = ix[k]
                rows[i, j >> 6] |= (<uint64_t>1) << (j & 63)
    return rows_arr


def mask_from_nodes(nodes, Py_ssize_t n_words):
    mask_arr = np.zeros(n_words, dtype=np.uint64)
    cdef uint64_t[::1] mask = mask_arr
    cdef const int64_t[::1] nd = np.ascontiguousarray(nodes, dtype=np.int64)
    cdef Py_ssize_t k
    cdef int64_t j
    for k in range(nd.shape[0]):
        j = nd[k]
        mask[j >> 6] |= (<uint64_t>1) << (j & 63)
    return mask_arr


def count_into(const uint64_t[:, ::1] rows, nodes, const uint64_t[::1] mask):
    cdef const int64_t[::1] nd = np.ascontiguousarray(nodes, dtype=np.int64)
    cdef Py_ssize_t m = nd.shape[0], w = mask.shape[0], i, k
    out_arr = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t c
    with nogil:
        for i in range(m):
            c = 0
            for k in range(w):
                c += popcount64(rows[nd[i], k] & mask[k])
            out[i] = c
    return out_arr


def local_bits(const uint64_t[:, ::1] rows, arena, sample, bint self_bit):
    cdef const int64_t[::1] ar = np.ascontiguousarray(arena, dtype=np.int64)
    cdef const int64_t[::1] sm = np.ascontiguousarray(sample, dtype=np.int64)
    if sm.shape[0] > 64:
        raise ValueError("sample larger than 64 nodes")
    cdef Py_ssize_t m = ar.shape[0], s = sm.shape[0], i, j
    out_arr = np.zeros(m, dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef int64_t a, b
    cdef uint64_t acc
    with nogil:
        for i in range(m):
            a = ar[i]
            acc = 0
            for j in range(s):
                b = sm[j]
                if (rows[a, b >> 6] >> (b & 63)) & 1 or (self_bit and a == b):
                    acc |= (<uint64_t>1) << j
            out[i] = acc
    return out_arr


cdef inline uint64_t _next_combination(uint64_t x) nogil:
    # Gosper's hack: next larger integer with the same popcount
    cdef uint64_t c = x & (~x + 1)
    cdef uint64_t r = x + c
    return (((r ^ x) >> 2) // c) | r


cdef object _record(dict seen, uint64_t[::1] vbuf, uint64_t mask):
    key = (<char*>&vbuf[0])[:vbuf.shape[0] * 8]
    prev = seen.get(key)
    if prev is None or mask < prev:
        seen[key] = mask


def _check_cells(Py_ssize_t count, Py_ssize_t m):
    if count * max(m, 1) > SCAN_CELL_LIMIT:
        raise BudgetExceededError(
            f"scan produced {count} distinct sets over {m} arena nodes; lower sample_prob_scale")


def _finish(dict seen, Py_ssize_t m):
    if not seen:
        return np.zeros((0, m), dtype=bool), np.zeros(0, dtype=np.uint64)
    _check_cells(len(seen), m)
    items = sorted(seen.items(), key=lambda t: t[1])
    words = np.frombuffer(b"".join(k for k, _ in items), dtype=np.uint64)
    words = words.reshape(len(items), -1)
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    vsets = bits[:, :m].astype(bool)
    wit = np.array([w for _, w in items], dtype=np.uint64)
    return vsets, wit


def subset_scan(arena_bits, int s, int max_size, min_count, budget):
    cdef const uint64_t[::1] ab = np.ascontiguousarray(arena_bits, dtype=np.uint64)
    cdef const int64_t[::1] mc = np.ascontiguousarray(min_count, dtype=np.int64)
    cdef Py_ssize_t m = ab.shape[0], i
    if s > 62:
        raise BudgetExceededError(f"subset scan over {s} sample nodes")
    cdef int top = min(max_size, s)
    from math import comb
    n_sub = sum(comb(s, j) for j in range(1, top + 1))
    if n_sub > budget:
        raise BudgetExceededError(
            f"subset scan would visit {n_sub} subsets (budget {budget})")
    cdef Py_ssize_t vw = max(1, (m + 63) // 64)
    vbuf_arr = np.zeros(vw, dtype=np.uint64)
    cdef uint64_t[::1] vbuf = vbuf_arr
    cdef dict seen = {}
    cdef uint64_t mask, limit = (<uint64_t>1) << s
    cdef int j
    cdef int64_t thr
    for j in range(1, top + 1):
        mask = ((<uint64_t>1) << j) - 1
        thr = mc[j]
        while mask < limit:
            with nogil:
                for i in range(vw):
                    vbuf[i] = 0
                for i in range(m):
                    if popcount64(ab[i] & mask) >= thr:
                        vbuf[i >> 6] |= (<uint64_t>1) << (i & 63)
            _record(seen, vbuf, mask)
            mask = _next_combination(mask)
    return _finish(seen, m)


cdef class _CliqueWalk:
    cdef uint64_t[::1] nbrs
    cdef const uint64_t[::1] ab
    cdef uint64_t[::1] vbuf
    cdef Py_ssize_t m, vw
    cdef int max_size
    cdef bint maximal_only
    cdef long long visited, budget
    cdef dict seen

    cdef void visit(self, uint64_t clique) except *:
        cdef Py_ssize_t i
        for i in range(self.vw):
            self.vbuf[i] = 0
        for i in range(self.m):
            if (self.ab[i] & clique) == clique:
                self.vbuf[i >> 6] |= (<uint64_t>1) << (i & 63)
        _record(self.seen, self.vbuf, clique)

    cdef void extend(self, uint64_t clique, int size, uint64_t cand,
                     uint64_t common) except *:
        cdef uint64_t low, c, com
        cdef int j
        while cand:
            low = cand & (~cand + 1)
            j = popcount64(low - 1)
            cand ^= low
            c = clique | low
            com = common & self.nbrs[j]
            self.visited += 1
            if self.visited > self.budget:
                raise BudgetExceededError(
                    f"clique enumeration exceeded budget {self.budget}")
            if not self.maximal_only or com == 0:
                self.visit(c)
            if size + 1 < self.max_size:
                self.extend(c, size + 1, cand & self.nbrs[j], com)


def clique_scan(sample_bits, arena_bits, int max_size, budget, bint maximal_only=False):
    cdef _CliqueWalk walk = _CliqueWalk()
    cdef Py_ssize_t s = len(sample_bits)
    if s > 64:
        raise ValueError("sample larger than 64 nodes")
    walk.nbrs = np.ascontiguousarray(sample_bits, dtype=np.uint64).copy()
    walk.ab = np.ascontiguousarray(arena_bits, dtype=np.uint64)
    walk.m = walk.ab.shape[0]
    walk.vw = max(1, (walk.m + 63) // 64)
    walk.vbuf = np.zeros(walk.vw, dtype=np.uint64)
    walk.max_size = max_size
    walk.maximal_only = maximal_only
    walk.visited = 0
    walk.budget = min(budget, 2**62)
    walk.seen = {}
    cdef uint64_t full
    if max_size >= 1 and s:
        full = ((<uint64_t>1) << s) - 1 if s < 64 else ~(<uint64_t>0)
        walk.extend(0, 0, full, full)
    return _finish(walk.seen, walk.m)


def common_counts(const uint64_t[:, ::1] rows):
    cdef Py_ssize_t n = rows.shape[0], w = rows.shape[1], u, v, k
    out_arr = np.zeros((n, n), dtype=np.int32)
    cdef int32_t[:, ::1] out = out_arr
    cdef int32_t c
    with nogil:
        for u in range(n):
            for v in range(u, n):
                c = 0
                for k in range(w):
                    c += popcount64(rows[u, k] & rows[v, k])
                out[u, v] = c
                out[v, u] = c
    return out_arr


def refine_dense(const uint64_t[:, ::1] rows, arena, vsets, core_min, ext_min):
    cdef const int64_t[::1] ar = np.ascontiguousarray(arena, dtype=np.int64)
    cdef const unsigned char[:, ::1] vs = np.ascontiguousarray(vsets, dtype=np.uint8)
    cdef const int64_t[::1] cmin = np.ascontiguousarray(core_min, dtype=np.int64)
    cdef const int64_t[::1] emin = np.ascontiguousarray(ext_min, dtype=np.int64)
    cdef Py_ssize_t n = rows.shape[0], w = rows.shape[1], r = vs.shape[0], m = vs.shape[1]
    out_arr = np.zeros((r, w), dtype=np.uint64)
    cdef uint64_t[:, ::1] out = out_arr
    cdef uint64_t[::1] vmask = np.zeros(w, dtype=np.uint64)
    cdef uint64_t[::1] umask = np.zeros(w, dtype=np.uint64)
    cdef int64_t[::1] mem = np.zeros(max(m, 1), dtype=np.int64)
    cdef Py_ssize_t i, j, k, t, cnt, ucnt
    cdef int64_t x, c, thr
    with nogil:
        for i in range(r):
            for k in range(w):
                vmask[k] = 0
                umask[k] = 0
            cnt = 0
            for j in range(m):
                if vs[i, j]:
                    x = ar[j]
                    vmask[x >> 6] |= (<uint64_t>1) << (x & 63)
                    mem[cnt] = x
                    cnt += 1
            if cnt == 0:
                continue
            thr = cmin[cnt]
            ucnt = 0
            for t in range(cnt):
                x = mem[t]
                c = 1
                for k in range(w):
                    c += popcount64(rows[x, k] & vmask[k])
                if c >= thr:
                    umask[x >> 6] |= (<uint64_t>1) << (x & 63)
                    ucnt += 1
            if ucnt == 0:
                continue
            thr = emin[ucnt]
            for x in range(n):
                c = (umask[x >> 6] >> (x & 63)) & 1
                for k in range(w):
                    c += popcount64(rows[x, k] & umask[k])
                if c >= thr:
                    out[i, x >> 6] |= (<uint64_t>1) << (x & 63)
    return out_arr


def certify_sets(const uint64_t[:, ::1] rows, sets, in_min, out_max):
    cdef const uint64_t[:, ::1] ss = np.ascontiguousarray(sets, dtype=np.uint64)
    cdef const int64_t[::1] imin = np.ascontiguousarray(in_min, dtype=np.int64)
    cdef const int64_t[::1] omax = np.ascontiguousarray(out_max, dtype=np.int64)
    cdef Py_ssize_t n = rows.shape[0], w = rows.shape[1], r = ss.shape[0], i, k, x
    out_arr = np.zeros(r, dtype=bool)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef int64_t size, c, inside
    cdef bint ok
    with nogil:
        for i in range(r):
            size = 0
            for k in range(w):
                size += popcount64(ss[i, k])
            if size == 0:
                continue
            ok = True
            for x in range(n):
                inside = (ss[i, x >> 6] >> (x & 63)) & 1
                c = inside
                for k in range(w):
                    c += popcount64(rows[x, k] & ss[i, k])
                if inside:
                    if c < imin[size]:
                        ok = False
                        break
                elif c > omax[size]:
                    ok = False
                    break
            out[i] = ok
    return out_arr
