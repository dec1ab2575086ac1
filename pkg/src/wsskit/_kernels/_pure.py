"""Pure-Python kernel implementations.

These are the reference semantics for the hot loops; the compiled module in
``_fast.pyx`` must produce bit-identical results (same arithmetic, same
operation order). Keep the two files in sync.
"""

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

#: 3 preceding tokens are inspected for negators/boosters.
MODIFIER_WINDOW = 3


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def ngram_buckets(tokens, n_buckets: int, bigrams: bool):
    """Hash tokens (and adjacent pairs) into ``n_buckets`` buckets.

    Returns unigram buckets followed by bigram buckets. A bigram hashes the
    byte stream ``first + b" " + second`` so no joined string is built.
    """
    out = []
    hashes = []
    for tok in tokens:
        h = _FNV_OFFSET
        for b in tok:
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
        hashes.append(h)
        out.append(h % n_buckets)
    if bigrams:
        for i in range(len(tokens) - 1):
            h = hashes[i]
            h = ((h ^ 0x20) * _FNV_PRIME) & _MASK64
            for b in tokens[i + 1]:
                h = ((h ^ b) * _FNV_PRIME) & _MASK64
            out.append(h % n_buckets)
    return out


def sentiment_raw_sum(valence, has_valence, negator, booster) -> float:
    """Sum token valences with negation flips and booster increments.

    A negator within the 3 preceding tokens flips the (boosted) valence; each
    booster in that window adds its increment toward the valence's sign.
    """
    val = valence.tolist()
    has = has_valence.tolist()
    neg = negator.tolist()
    boo = booster.tolist()
    total = 0.0
    for i in range(len(val)):
        if not has[i]:
            continue
        v = val[i]
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
            if boo[j] != 0.0:
                v = v + sign * boo[j]
            if neg[j]:
                flip = True
        if flip:
            v = -v
        total += v
    return total


def jaccard_singlelink(indptr, indices, threshold: float):
    """Single-linkage clustering of row sets under Jaccard similarity.

    Rows are sets of int ids in CSR form. Two rows join when
    ``|a & b| / |a | b| >= threshold`` (empty rows never join). Returns one
    label per row: the smallest row index in its cluster.
    """
    n = len(indptr) - 1
    sets = [frozenset(indices[indptr[i]:indptr[i + 1]].tolist()) for i in range(n)]
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for i in range(n):
        si = sets[i]
        if not si:
            continue
        li = len(si)
        for j in range(i + 1, n):
            sj = sets[j]
            if not sj:
                continue
            inter = len(si & sj)
            union = li + len(sj) - inter
            if inter / union >= threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        labels[i] = find(i)
    return labels
