"""Hot-loop kernels with a compiled fast path.

The Cython extension is used when it was built; otherwise the pure-Python
module takes over with identical results. Set ``WSSKIT_PURE=1`` to force the
fallback (useful for benchmarking and parity checks).
"""

import os

from wsskit._kernels import _pure

if os.environ.get("WSSKIT_PURE"):
    _impl = _pure
    BACKEND = "python"
else:
    try:
        from wsskit._kernels import _fast as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "python"

MODIFIER_WINDOW = _pure.MODIFIER_WINDOW

fnv1a_64 = _impl.fnv1a_64
ngram_buckets = _impl.ngram_buckets
sentiment_raw_sum = _impl.sentiment_raw_sum
jaccard_singlelink = _impl.jaccard_singlelink
