# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_search_py.best_subset`` over int64 data."""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint64_t


cdef struct Ctx:
    int n
    int nsum
    int ncnt
    int64_t count_cap
    int64_t *weights
    int64_t *demands
    int64_t *caps
    uint64_t *sum_rows
    uint64_t *cnt_rows
    int64_t *sums
    int64_t *cnts
    int64_t *suffix
    int64_t best_w
    uint64_t best_m


cdef inline bint lex_smaller(uint64_t a, uint64_t b) nogil:
    cdef uint64_t x
    if a == b:
        return False
    x = (a ^ b) & (~(a ^ b) + 1)
    if a & x:
        return (b & ~(x - 1)) != 0
    return (a & ~(x - 1)) == 0


cdef void dfs(Ctx *c, int i, uint64_t mask, int64_t w) nogil:
    cdef int r
    cdef bint ok = True
    cdef uint64_t bit
    cdef int64_t d
    if w + c.suffix[i] < c.best_w:
        return
    if i == c.n:
        if w > c.best_w or (w == c.best_w and lex_smaller(mask, c.best_m)):
            c.best_w = w
            c.best_m = mask
        return
    bit = (<uint64_t>1) << i
    d = c.demands[i]
    for r in range(c.nsum):
        if c.sum_rows[r] & bit and c.sums[r] + d > c.caps[r]:
            ok = False
            break
    if ok:
        for r in range(c.ncnt):
            if c.cnt_rows[r] & bit and c.cnts[r] + 1 > c.count_cap:
                ok = False
                break
    if ok:
        for r in range(c.nsum):
            if c.sum_rows[r] & bit:
                c.sums[r] += d
        for r in range(c.ncnt):
            if c.cnt_rows[r] & bit:
                c.cnts[r] += 1
        dfs(c, i + 1, mask | bit, w + c.weights[i])
        for r in range(c.nsum):
            if c.sum_rows[r] & bit:
                c.sums[r] -= d
        for r in range(c.ncnt):
            if c.cnt_rows[r] & bit:
                c.cnts[r] -= 1
    dfs(c, i + 1, mask, w)


def best_subset(weights, demands, sum_rows, sum_caps, count_rows, count_cap):
    cdef Ctx c
    cdef int i
    c.n = len(weights)
    c.nsum = len(sum_rows)
    c.ncnt = len(count_rows)
    c.count_cap = count_cap
    c.weights = <int64_t *> malloc(max(c.n, 1) * sizeof(int64_t))
    c.demands = <int64_t *> malloc(max(c.n, 1) * sizeof(int64_t))
    c.suffix = <int64_t *> malloc((c.n + 1) * sizeof(int64_t))
    c.caps = <int64_t *> malloc(max(c.nsum, 1) * sizeof(int64_t))
    c.sums = <int64_t *> malloc(max(c.nsum, 1) * sizeof(int64_t))
    c.sum_rows = <uint64_t *> malloc(max(c.nsum, 1) * sizeof(uint64_t))
    c.cnt_rows = <uint64_t *> malloc(max(c.ncnt, 1) * sizeof(uint64_t))
    c.cnts = <int64_t *> malloc(max(c.ncnt, 1) * sizeof(int64_t))
    try:
        for i in range(c.n):
            c.weights[i] = weights[i]
            c.demands[i] = demands[i]
        c.suffix[c.n] = 0
        for i in range(c.n - 1, -1, -1):
            c.suffix[i] = c.suffix[i + 1] + c.weights[i]
        for i in range(c.nsum):
            c.sum_rows[i] = sum_rows[i]
            c.caps[i] = sum_caps[i]
            c.sums[i] = 0
        for i in range(c.ncnt):
            c.cnt_rows[i] = count_rows[i]
            c.cnts[i] = 0
        c.best_w = -1
        c.best_m = 0
        with nogil:
            dfs(&c, 0, 0, 0)
        return c.best_m
    finally:
        free(c.weights)
        free(c.demands)
        free(c.suffix)
        free(c.caps)
        free(c.sums)
        free(c.sum_rows)
        free(c.cnt_rows)
        free(c.cnts)
