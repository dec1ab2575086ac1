"""Raw engagement signals: per-text sentiment, per-user bias and credibility.

These feed the weak labelers. All scorers are pure functions of immutable
inputs and parallelize trivially across engagements/users.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from wsskit import _kernels
from wsskit.corpus import Dataset, User
from wsskit.errors import ValidationError
from wsskit.ioutil import read_jsonl
from wsskit.textproc import tokenize

#: Raw valence sums map to [-1, 1] via s / sqrt(s^2 + ALPHA).
NORMALIZATION_ALPHA = 15.0

#: Mean increment a degree adverb adds toward a valence's sign.
BOOST_INCR = 0.293

DEFAULT_NEGATORS = frozenset({
    "not", "no", "never", "none", "neither", "nor", "cannot",
    "cant", "dont", "wont", "isnt", "wasnt", "arent", "didnt",
    "doesnt", "couldnt", "shouldnt", "wouldnt", "aint", "without",
})

DEFAULT_BOOSTERS = {
    "very": BOOST_INCR, "really": BOOST_INCR, "extremely": BOOST_INCR,
    "absolutely": BOOST_INCR, "completely": BOOST_INCR, "totally": BOOST_INCR,
    "incredibly": BOOST_INCR, "so": BOOST_INCR, "super": BOOST_INCR,
    "utterly": BOOST_INCR, "deeply": BOOST_INCR, "hugely": BOOST_INCR,
}

#: Users whose engagement sets overlap at least this much (Jaccard) are
#: single-linked into one coordination cluster.
DEFAULT_CLUSTER_THRESHOLD = 0.5


@dataclass(frozen=True)
class SentimentLexicon:
    valence: dict
    negators: frozenset = DEFAULT_NEGATORS
    boosters: dict = field(default_factory=lambda: dict(DEFAULT_BOOSTERS))

    def __post_init__(self):
        for token, v in self.valence.items():
            if not math.isfinite(v):
                raise ValidationError(f"non-finite valence for token {token!r}")
        for token, v in self.boosters.items():
            if not v > 0:
                raise ValidationError(f"booster increment must be positive: {token!r}")


@dataclass(frozen=True)
class SignalTable:
    sentiment_by_engagement: dict
    bias_by_user: dict
    credibility_by_user: dict


def load_token_values(path) -> dict:
    """Read a {token, value} JSON Lines file into a token -> float map."""
    values = {}
    for _, obj in read_jsonl(path):
        values[str(obj["token"])] = float(obj["value"])
    return values


def load_lexicon(path, negators=None, boosters=None) -> SentimentLexicon:
    """Build a lexicon from a valence file; negators/boosters default to the
    built-in sets when not given."""
    kwargs = {}
    if negators is not None:
        kwargs["negators"] = frozenset(negators)
    if boosters is not None:
        kwargs["boosters"] = dict(boosters)
    return SentimentLexicon(valence=load_token_values(path), **kwargs)


def score_sentiment(text: str, lexicon: SentimentLexicon) -> float:
    """Score text in [-1, 1] from the lexicon's token valences.

    Valences are summed left to right. A negator within the 3 preceding
    tokens flips a valence (after boosting); each booster in that window adds
    its increment toward the valence's sign. The raw sum s is squashed to
    s / sqrt(s^2 + 15), so |result| < 1 and neutral text scores 0.0.
    """
    tokens = tokenize(text)
    if not tokens:
        return 0.0
    n = len(tokens)
    valence = np.zeros(n)
    has_valence = np.zeros(n, dtype=np.uint8)
    negator = np.zeros(n, dtype=np.uint8)
    booster = np.zeros(n)
    vmap, nset, bmap = lexicon.valence, lexicon.negators, lexicon.boosters
    for i, tok in enumerate(tokens):
        v = vmap.get(tok)
        if v is not None:
            valence[i] = v
            has_valence[i] = 1
        if tok in nset:
            negator[i] = 1
        b = bmap.get(tok)
        if b is not None:
            booster[i] = b
    raw = _kernels.sentiment_raw_sum(valence, has_valence, negator, booster)
    if raw == 0.0:
        return 0.0
    return raw / math.sqrt(raw * raw + NORMALIZATION_ALPHA)


def user_bias(u: User, seed_bias: dict) -> float:
    """Mean seed value over all matched history tokens, clamped to [-1, 1]."""
    total = 0.0
    count = 0
    for text in u.history_texts:
        for tok in tokenize(text):
            v = seed_bias.get(tok)
            if v is not None:
                total += v
                count += 1
    if count == 0:
        return 0.0
    return min(1.0, max(-1.0, total / count))


def user_credibility(d: Dataset, threshold: float = DEFAULT_CLUSTER_THRESHOLD) -> dict:
    """Credibility in [0, 1] per user from coordination-cluster sizes.

    Users are clustered by single linkage on the Jaccard similarity of their
    engaged-news sets; large coordinated clusters read as low credibility:
    credibility = 1 - (cluster_size - 1) / (max_cluster_size - 1), or 1.0 for
    everyone when no cluster has more than one member.
    """
    user_ids = [u.id for u in d.users]
    user_pos = {uid: i for i, uid in enumerate(user_ids)}
    news_pos = {n.id: i for i, n in enumerate(d.news)}
    engaged = [set() for _ in user_ids]
    for e in d.engagements:
        engaged[user_pos[e.user_id]].add(news_pos[e.news_id])

    indptr = np.zeros(len(user_ids) + 1, dtype=np.int64)
    flat = []
    for i, s in enumerate(engaged):
        row = sorted(s)
        flat.extend(row)
        indptr[i + 1] = indptr[i] + len(row)
    indices = np.asarray(flat, dtype=np.int32)

    labels = _kernels.jaccard_singlelink(indptr, indices, threshold)
    sizes = {}
    for lab in labels.tolist():
        sizes[lab] = sizes.get(lab, 0) + 1
    max_size = max(sizes.values(), default=0)
    if max_size <= 1:
        return {uid: 1.0 for uid in user_ids}
    return {
        uid: 1.0 - (sizes[labels[i]] - 1) / (max_size - 1)
        for i, uid in enumerate(user_ids)
    }


def compute_signals(d: Dataset, lexicon: SentimentLexicon, seed_bias: dict,
                    replies_only: bool = False,
                    cluster_threshold: float = DEFAULT_CLUSTER_THRESHOLD) -> SignalTable:
    """Apply all three scorers across the dataset.

    Sentiment covers every engagement that carries text (replies only when
    ``replies_only`` is set); bias and credibility cover every user.
    """
    sentiment = {}
    for e in d.engagements:
        if e.text is None:
            continue
        if replies_only and e.kind != "reply":
            continue
        sentiment[e.id] = score_sentiment(e.text, lexicon)
    bias = {u.id: user_bias(u, seed_bias) for u in d.users}
    credibility = user_credibility(d, threshold=cluster_threshold)
    return SignalTable(sentiment_by_engagement=sentiment, bias_by_user=bias,
                       credibility_by_user=credibility)
