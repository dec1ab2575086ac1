"""Parity between the compiled kernels and the pure-Python fallback."""

import numpy as np
import pytest

from wsskit._kernels import _pure

try:
    from wsskit._kernels import _fast
except ImportError:
    _fast = None

needs_fast = pytest.mark.skipif(_fast is None, reason="compiled kernels not built")


def test_fnv1a_reference_vectors():
    # standard FNV-1a 64-bit test vectors
    assert _pure.fnv1a_64(b"") == 0xCBF29CE484222325
    assert _pure.fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert _pure.fnv1a_64(b"foobar") == 0x85944171F73967E8


@needs_fast
def test_fnv1a_parity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        data = bytes(rng.integers(0, 256, size=int(rng.integers(0, 40))).tolist())
        assert _fast.fnv1a_64(data) == _pure.fnv1a_64(data)


@needs_fast
def test_ngram_buckets_parity():
    rng = np.random.default_rng(1)
    alphabet = ["alpha", "beta", "café", "中文", "x", "longtokenhere"]
    for _ in range(60):
        tokens = [alphabet[int(i)].encode("utf-8")
                  for i in rng.integers(0, len(alphabet), size=int(rng.integers(0, 12)))]
        for buckets in (7, 64, 65536):
            for bigrams in (False, True):
                assert (_fast.ngram_buckets(tokens, buckets, bigrams)
                        == _pure.ngram_buckets(tokens, buckets, bigrams))


@needs_fast
def test_sentiment_raw_sum_parity_bitwise():
    rng = np.random.default_rng(2)
    for _ in range(200):
        n = int(rng.integers(0, 30))
        valence = np.round(rng.normal(0, 2, n), 3)
        has = (rng.random(n) < 0.5).astype(np.uint8)
        neg = (rng.random(n) < 0.2).astype(np.uint8)
        boo = np.where(rng.random(n) < 0.2, 0.293, 0.0)
        a = _fast.sentiment_raw_sum(valence, has, neg, boo)
        b = _pure.sentiment_raw_sum(valence, has, neg, boo)
        assert a == b  # bit-identical, not approx


@needs_fast
def test_jaccard_singlelink_parity():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(1, 25))
        sets = [np.unique(rng.integers(0, 12, size=int(rng.integers(0, 8))))
                for _ in range(n)]
        indptr = np.zeros(n + 1, dtype=np.int64)
        flat = []
        for i, s in enumerate(sets):
            flat.extend(s.tolist())
            indptr[i + 1] = indptr[i] + len(s)
        indices = np.asarray(flat, dtype=np.int32)
        for threshold in (0.0, 0.3, 0.5, 1.0):
            fast = _fast.jaccard_singlelink(indptr, indices, threshold)
            pure = _pure.jaccard_singlelink(indptr, indices, threshold)
            assert np.array_equal(fast, pure)


def test_jaccard_labels_are_min_member():
    indptr = np.array([0, 2, 4, 5], dtype=np.int64)
    indices = np.array([0, 1, 0, 1, 3], dtype=np.int32)
    labels = _pure.jaccard_singlelink(indptr, indices, 0.5)
    assert labels.tolist() == [0, 0, 2]


def test_pure_backend_env_override(tmp_path):
    import subprocess
    import sys

    code = "import wsskit._kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"PATH": "/usr/bin:/bin", "WSSKIT_PURE": "1"})
    assert out.stdout.strip() == "python"
