"""Tokenization and hashed bag-of-ngrams shared by the feature builders."""

import re

from wsskit import _kernels

# Maximal runs of word characters; everything else (whitespace, punctuation)
# separates tokens.
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list:
    """Lowercase and split on Unicode whitespace/punctuation."""
    return _TOKEN_RE.findall(text.lower())


def hashed_counts(tokens, n_buckets: int, bigrams: bool = False) -> dict:
    """Count hashed unigrams (and optionally bigrams) into ``n_buckets``.

    Sign-less hashing: every occurrence adds +1 to its bucket.
    """
    counts = {}
    encoded = [t.encode("utf-8") for t in tokens]
    for bucket in _kernels.ngram_buckets(encoded, n_buckets, bigrams):
        counts[bucket] = counts.get(bucket, 0) + 1
    return counts
