# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel implementations.

Bit-identical mirror of ``_pure.py`` (same arithmetic, same operation
order); compiled with -ffp-contract=off so float results match exactly.
"""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_GET_SIZE
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, free

import numpy as np

cdef uint64_t FNV_OFFSET = 0xCBF29CE484222325u
cdef uint64_t FNV_PRIME = 0x100000001B3u

MODIFIER_WINDOW = 3


cdef inline uint64_t _fnv1a_bytes(uint64_t h, const unsigned char* data, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ data[i]) * FNV_PRIME
    return h


def fnv1a_64(bytes data):
    """64-bit FNV-1a hash of a byte string."""
    cdef const unsigned char* p = <const unsigned char*>PyBytes_AS_STRING(data)
    return _fnv1a_bytes(FNV_OFFSET, p, PyBytes_GET_SIZE(data))


def ngram_buckets(list tokens, long n_buckets, bint bigrams):
    """Hash tokens (and adjacent pairs) into ``n_buckets`` buckets."""
    cdef Py_ssize_t ntok = len(tokens)
    cdef uint64_t* hashes = <uint64_t*>malloc(ntok * sizeof(uint64_t) if ntok else 1)
    if hashes == NULL:
        raise MemoryError()
    cdef list out = []
    cdef uint64_t h, nb = <uint64_t>n_buckets
    cdef const unsigned char* p
    cdef bytes tok
    cdef Py_ssize_t i
    try:
        for i in range(ntok):
            tok = <bytes>tokens[i]
            p = <const unsigned char*>PyBytes_AS_STRING(tok)
            h = _fnv1a_bytes(FNV_OFFSET, p, PyBytes_GET_SIZE(tok))
            hashes[i] = h
            out.append(h % nb)
        if bigrams:
            for i in range(ntok - 1):
                h = (hashes[i] ^ 0x20u) * FNV_PRIME
                tok = <bytes>tokens[i + 1]
                p = <const unsigned char*>PyBytes_AS_STRING(tok)
                h = _fnv1a_bytes(h, p, PyBytes_GET_SIZE(tok))
                out.append(h % nb)
    finally:
        free(hashes)
    return out


def sentiment_raw_sum(double[::1] valence, uint8_t[::1] has_valence,
                      uint8_t[::1] negator, double[::1] booster):
    """Sum token valences with negation flips and booster increments."""
    cdef Py_ssize_t n = valence.shape[0]
    cdef Py_ssize_t i, j, lo
    cdef double total = 0.0
    cdef double v, sign
    cdef bint flip
    for i in range(n):
        if not has_valence[i]:
            continue
        v = valence[i]
        if v > 0.0:
            sign = 1.0
        elif v < 0.0:
            sign = -1.0
        else:
            sign = 0.0
        lo = i - MODIFIER_WINDOW
        if lo < 0:
            lo = 0
        flip = False
        for j in range(lo, i):
            if booster[j] != 0.0:
                v = v + sign * booster[j]
            if negator[j]:
                flip = True
        if flip:
            v = -v
        total += v
    return total


cdef Py_ssize_t _find(int64_t* parent, Py_ssize_t x) nogil:
    cdef Py_ssize_t root = x
    cdef Py_ssize_t nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def jaccard_singlelink(int64_t[::1] indptr, int32_t[::1] indices, double threshold):
    """Single-linkage clustering of sorted CSR row sets under Jaccard."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef int64_t* parent = <int64_t*>malloc(n * sizeof(int64_t) if n else 1)
    if parent == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, ri, rj
    cdef Py_ssize_t ai, bi, na, nb
    cdef int64_t inter, union_
    cdef const int32_t* ind = &indices[0] if indices.shape[0] else NULL
    labels = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] lab = labels
    with nogil:
        for i in range(n):
            parent[i] = i
        for i in range(n):
            na = indptr[i + 1] - indptr[i]
            if na == 0:
                continue
            for j in range(i + 1, n):
                nb = indptr[j + 1] - indptr[j]
                if nb == 0:
                    continue
                ai = indptr[i]
                bi = indptr[j]
                inter = 0
                while ai < indptr[i + 1] and bi < indptr[j + 1]:
                    if ind[ai] < ind[bi]:
                        ai += 1
                    elif ind[ai] > ind[bi]:
                        bi += 1
                    else:
                        inter += 1
                        ai += 1
                        bi += 1
                union_ = na + nb - inter
                if (<double>inter) / (<double>union_) >= threshold:
                    ri = _find(parent, i)
                    rj = _find(parent, j)
                    if ri != rj:
                        if ri < rj:
                            parent[rj] = ri
                        else:
                            parent[ri] = rj
        for i in range(n):
            lab[i] = _find(parent, i)
    free(parent)
    return labels
