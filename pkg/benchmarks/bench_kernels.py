#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs each kernel on a realistic synthetic workload and prints a table with
per-backend throughput and the speedup factor. Also times the end-to-end
signal computation on a generated corpus under both backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from wsskit._kernels import _pure

try:
    from wsskit._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_sentiment(impl, texts_tokens):
    def run():
        for valence, has, neg, boo in texts_tokens:
            impl.sentiment_raw_sum(valence, has, neg, boo)
    return run


def bench_hashing(impl, token_lists):
    def run():
        for tokens in token_lists:
            impl.ngram_buckets(tokens, 65536, True)
    return run


def bench_jaccard(impl, indptr, indices):
    def run():
        impl.jaccard_singlelink(indptr, indices, 0.5)
    return run


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)

    # sentiment: 20k short texts worth of token arrays
    texts_tokens = []
    for _ in range(20000):
        n = int(rng.integers(3, 15))
        texts_tokens.append((
            np.round(rng.normal(0, 2, n), 2),
            (rng.random(n) < 0.4).astype(np.uint8),
            (rng.random(n) < 0.1).astype(np.uint8),
            np.where(rng.random(n) < 0.1, 0.293, 0.0),
        ))

    # hashing: 5k texts of ~50 tokens
    words = [f"word{i}".encode() for i in range(500)]
    token_lists = [[words[int(j)] for j in rng.integers(0, 500, size=50)]
                   for _ in range(5000)]

    # jaccard: 1500 users engaging ~20 of 800 items
    sets = [np.unique(rng.integers(0, 800, size=int(rng.integers(5, 30))))
            for _ in range(1500)]
    indptr = np.zeros(len(sets) + 1, dtype=np.int64)
    flat = []
    for i, s in enumerate(sets):
        flat.extend(s.tolist())
        indptr[i + 1] = indptr[i] + len(s)
    indices = np.asarray(flat, dtype=np.int32)

    workloads = [
        ("sentiment_raw_sum (20k texts)", bench_sentiment, (texts_tokens,)),
        ("ngram_buckets (5k x 50 tokens)", bench_hashing, (token_lists,)),
        ("jaccard_singlelink (1500 users)", bench_jaccard, (indptr, indices)),
    ]

    print(f"{'kernel workload':<34} {'pure (s)':>10} {'cython (s)':>11} {'speedup':>9}")
    for name, factory, extra in workloads:
        t_pure = _time(factory(_pure, *extra), args.repeat)
        if _fast is None:
            print(f"{name:<34} {t_pure:>10.3f} {'n/a':>11} {'n/a':>9}")
            continue
        t_fast = _time(factory(_fast, *extra), args.repeat)
        print(f"{name:<34} {t_pure:>10.3f} {t_fast:>11.3f} {t_pure / t_fast:>8.1f}x")

    # end-to-end: signal table over a planted corpus, both backends
    import wsskit._kernels as kernels
    from wsskit import signals, synth

    d, _ = synth.generate(synth.SynthConfig(n_news=400, n_users=800, seed=3,
                                            credibility_gap=1.0, sentiment_gap=1.0))
    originals = (kernels.sentiment_raw_sum, kernels.ngram_buckets,
                 kernels.jaccard_singlelink)

    def run_signals():
        signals.compute_signals(d, synth.default_lexicon(), synth.default_seed_bias())

    for label, impl in (("pure", _pure), ("cython", _fast)):
        if impl is None:
            continue
        kernels.sentiment_raw_sum = impl.sentiment_raw_sum
        kernels.ngram_buckets = impl.ngram_buckets
        kernels.jaccard_singlelink = impl.jaccard_singlelink
        # signals module binds the kernels module, not the functions, so the
        # swap above is visible to it
        t = _time(run_signals, args.repeat)
        print(f"compute_signals end-to-end [{label:>6}]: {t:.3f}s")
    (kernels.sentiment_raw_sum, kernels.ngram_buckets,
     kernels.jaccard_singlelink) = originals


if __name__ == "__main__":
    main()
