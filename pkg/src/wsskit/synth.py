"""Planted-ground-truth synthetic corpora.

The generator plants exactly the structures the weak labelers threshold, each
behind its own gap knob so a signal can be switched off (gap 0, labeler at
chance) or fully on (gap 1, labeler recoverable):

* sentiment_gap: engagement sentiment on fake items is drawn with variance
  scaled by (1 + gap) - doubled at full strength - via a polarized +/- offset.
* bias_gap: partisan users (|bias| ~ gap) preferentially engage fake items,
  and half the publishers take partisanship +/- gap and publish fake more.
* credibility_gap: a coordinated user block co-engages most fake items
  (forming one big Jaccard cluster) with probability scaled by the gap.
* cascade_boost: fake items get boost-times the expected reposts, attached
  faster, so fake cascades grow larger and deeper.
* vocab_signal: per-token probability of drawing from class-tilted topic
  vocabulary instead of noise.
* homophily_strength: scales the intra-community share of friendship edges
  and the community skew of who engages which class.

Small class-blind "hobby cliques" always co-engage a few items so that
credibility and bias scores vary even with every gap at zero; without them a
zero-signal labeler would degenerate to a constant verdict instead of chance.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from wsskit.corpus import Dataset, Engagement, NewsArticle, Publisher, User
from wsskit.errors import ValidationError
from wsskit.ioutil import write_jsonl
from wsskit.signals import SentimentLexicon

VALENCE_LEXICON = {
    "okay": 0.25, "decent": 0.75, "nice": 1.25, "good": 1.75,
    "solid": 2.25, "great": 2.75, "amazing": 3.25,
    "meh": -0.25, "iffy": -0.75, "poor": -1.25, "bad": -1.75,
    "grim": -2.25, "awful": -2.75, "terrible": -3.25,
}

SEED_BIAS = {f"leanright{i}": 1.0 for i in range(6)}
SEED_BIAS.update({f"leanleft{i}": -1.0 for i in range(6)})

_TOPIC_A = [f"topica{i:02d}" for i in range(20)]  # fake-tilted half
_TOPIC_B = [f"topicb{i:02d}" for i in range(20)]
_NOISE = [f"word{i:03d}" for i in range(400)]
_FILLER = ["update", "thread", "article", "story", "reading", "source"]

#: Probability that a topic token comes from its own class's half.
TOPIC_TILT = 0.35

#: Within-item sentiment noise (valence units).
SENTIMENT_SIGMA = 0.5

#: Spread of the per-item sentiment offset shared by all engagers.
ITEM_MOOD_SIGMA = 0.25

_POSTS_PER_NEWS = 2
_REPOST_MEAN = 4.0
_BLOCK_PUSH_RATE = 0.95


def default_lexicon() -> SentimentLexicon:
    return SentimentLexicon(valence=dict(VALENCE_LEXICON))


def default_seed_bias() -> dict:
    return dict(SEED_BIAS)


def write_reference_files(directory) -> None:
    """Write the lexicon and seed-bias files the generated corpora assume."""
    write_jsonl(os.path.join(directory, "lexicon.jsonl"),
                ({"token": t, "value": v} for t, v in VALENCE_LEXICON.items()))
    write_jsonl(os.path.join(directory, "seed_bias.jsonl"),
                ({"token": t, "value": v} for t, v in SEED_BIAS.items()))


@dataclass(frozen=True)
class SynthConfig:
    n_news: int = 200
    n_users: int = 400
    n_publishers: int = 12
    fake_fraction: float = 0.35
    homophily_strength: float = 0.0
    bias_gap: float = 0.0
    credibility_gap: float = 0.0
    sentiment_gap: float = 0.0
    cascade_boost: float = 1.0
    vocab_signal: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.n_news, self.n_users, self.n_publishers) < 2:
            raise ValidationError("need at least 2 news, users, and publishers")
        if not 0.0 < self.fake_fraction < 1.0:
            raise ValidationError("fake_fraction must be in (0, 1)")
        for name in ("homophily_strength", "bias_gap", "credibility_gap",
                     "sentiment_gap", "vocab_signal"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1]")
        if self.cascade_boost < 1.0:
            raise ValidationError("cascade_boost must be >= 1")


def _nearest_valence_token(value: float) -> str:
    return min(VALENCE_LEXICON, key=lambda t: (abs(VALENCE_LEXICON[t] - value), t))


class _Builder:
    """Accumulates engagements with sequential ids and per-news macro lists."""

    def __init__(self):
        self.engagements = []
        self.macro = {}  # news id -> list of (engagement id, timestamp)

    def add(self, user_id, news_id, kind, parent_id, timestamp, text=None):
        eid = f"e{len(self.engagements):06d}"
        self.engagements.append(Engagement(
            id=eid, user_id=user_id, news_id=news_id, kind=kind,
            parent_id=parent_id, timestamp=int(timestamp), text=text))
        if kind in ("post", "repost"):
            self.macro.setdefault(news_id, []).append((eid, int(timestamp)))
        return eid


def generate(cfg: SynthConfig):
    """Generate a corpus plus its ground truth, deterministically from the seed.

    Returns (Dataset, ground_truth) where ground_truth maps news id to
    fake/real. Every news article also carries its label as clean_label, so
    callers choose how much supervision to reveal.
    """
    rng = np.random.default_rng(cfg.seed)

    # --- publishers: half take partisanship +/- bias_gap, half stay neutral
    n_biased = cfg.n_publishers // 2
    publishers = []
    for i in range(cfg.n_publishers):
        if i < n_biased:
            part = cfg.bias_gap if i % 2 == 0 else -cfg.bias_gap
        else:
            part = 0.0
        publishers.append(Publisher(id=f"p{i:03d}", partisanship=part))
    biased_pool = np.arange(n_biased)
    neutral_pool = np.arange(n_biased, cfg.n_publishers)

    # --- users: stripes decide community, partisanship, block, hobby roles
    half = cfg.n_users // 2
    community = np.array([0 if i < half else 1 for i in range(cfg.n_users)])
    is_partisan = np.array([i % 2 == 0 for i in range(cfg.n_users)])
    is_block = np.array([i % 10 == 3 for i in range(cfg.n_users)])
    hobby_pool = [i for i in range(cfg.n_users) if i % 10 in (6, 7)]

    users = []
    for i in range(cfg.n_users):
        jitter = rng.uniform(-0.15, 0.15)
        if is_partisan[i]:
            lean = 1.0 if (i // 2) % 2 == 0 else -1.0
            beta = max(-1.0, min(1.0, lean * cfg.bias_gap + jitter))
        else:
            beta = jitter
        n_tokens = 12
        n_pos = int(round(n_tokens * (1.0 + beta) / 2.0))
        toks = [f"leanright{rng.integers(6)}" for _ in range(n_pos)]
        toks += [f"leanleft{rng.integers(6)}" for _ in range(n_tokens - n_pos)]
        fillers = [_FILLER[rng.integers(len(_FILLER))] for _ in range(4)]
        words = toks + fillers
        words = [words[k] for k in rng.permutation(len(words))]
        texts = (" ".join(words[:8]), " ".join(words[8:]))
        users.append(User(id=f"u{i:05d}", history_texts=texts))
    user_id = lambda i: users[i].id

    # Hobby users engage nothing but their clique targets, so their
    # engagement sets stay near-identical and the cliques actually cluster.
    hobby_set = set(hobby_pool)
    general = np.array([i for i in range(cfg.n_users) if i not in hobby_set])
    pools = {}
    for p in (True, False):
        for c in (0, 1):
            members = [i for i in range(cfg.n_users)
                       if bool(is_partisan[i]) == p and community[i] == c
                       and i not in hobby_set]
            pools[(p, c)] = np.array(members if members else list(general))

    # --- hobby cliques: small class-blind co-engagement groups
    cliques = []
    pos = 0
    while pos + 2 <= len(hobby_pool):
        size = int(rng.integers(2, 5))
        members = hobby_pool[pos:pos + size]
        if len(members) < 2:
            break
        pos += size
        n_targets = int(rng.integers(8, 17))
        targets = rng.choice(cfg.n_news, size=min(n_targets, cfg.n_news), replace=False)
        cliques.append((members, sorted(int(t) for t in targets)))

    # --- friendships: two communities, intra share scaled by homophily
    n_edges = 3 * cfg.n_users
    edges = set()
    p_intra = 0.5 + 0.5 * cfg.homophily_strength
    attempts = 0
    while len(edges) < n_edges and attempts < 20 * n_edges:
        attempts += 1
        side = int(rng.integers(2))
        members = np.flatnonzero(community == side)
        if rng.random() < p_intra and len(members) >= 2:
            i, j = rng.choice(members, size=2, replace=False)
        else:
            i = int(rng.choice(np.flatnonzero(community == 0)))
            j = int(rng.choice(np.flatnonzero(community == 1)))
        a, b = int(min(i, j)), int(max(i, j))
        if a != b:
            edges.add((a, b))
    friendships = [(user_id(a), user_id(b)) for a, b in sorted(edges)]

    # --- news: labels, topics, publishers
    n_fake = min(max(int(round(cfg.n_news * cfg.fake_fraction)), 1), cfg.n_news - 1)
    order = rng.permutation(cfg.n_news)
    fake_set = {int(j) for j in order[:n_fake]}

    news = []
    ground_truth = {}
    base_ts = 1_600_000_000
    for j in range(cfg.n_news):
        fake = j in fake_set
        label = "fake" if fake else "real"
        length = int(rng.integers(30, 61))
        own, other = (_TOPIC_A, _TOPIC_B) if fake else (_TOPIC_B, _TOPIC_A)
        words = []
        for _ in range(length):
            if rng.random() < cfg.vocab_signal:
                bank = own if rng.random() < (1.0 + TOPIC_TILT) / 2.0 else other
                words.append(bank[rng.integers(len(bank))])
            else:
                words.append(_NOISE[rng.integers(len(_NOISE))])
        p_biased_pub = 0.5 + 0.45 * cfg.bias_gap if fake else 0.5 - 0.45 * cfg.bias_gap
        pool = biased_pool if rng.random() < p_biased_pub else neutral_pool
        pub = publishers[int(pool[rng.integers(len(pool))])].id
        nid = f"n{j:05d}"
        published = base_ts + j * 977
        news.append(NewsArticle(id=nid, publisher_id=pub, text=" ".join(words),
                                published_at=published, clean_label=label))
        ground_truth[nid] = label

    # --- engagements
    builder = _Builder()
    spread = SENTIMENT_SIGMA * math.sqrt(cfg.sentiment_gap)
    for j in range(cfg.n_news):
        nid = news[j].id
        fake = j in fake_set
        published = news[j].published_at
        boost = cfg.cascade_boost if fake else 1.0

        # scored engagers: partisan/community mix depends on the class
        n_scored = int(rng.integers(48, 57))
        p_part = 0.5 + (0.45 * cfg.bias_gap if fake else -0.45 * cfg.bias_gap)
        p_comm1 = 0.5 + (0.35 * cfg.homophily_strength if fake
                         else -0.35 * cfg.homophily_strength)
        part_flips = rng.random(n_scored) < p_part
        comm_flips = rng.random(n_scored) < p_comm1
        scored = []
        for p_flag, c_flag in zip(part_flips, comm_flips):
            pool = pools[(bool(p_flag), int(c_flag))]
            for _ in range(30):
                pick = int(pool[rng.integers(len(pool))])
                if pick not in scored:
                    scored.append(pick)
                    break

        mu = rng.normal(0.0, ITEM_MOOD_SIGMA)
        all_nodes = []  # (engagement id, timestamp) of every engagement so far
        for rank, uidx in enumerate(scored):
            if fake:
                polarity = 1.0 if rng.random() < 0.5 else -1.0
                valence = mu + polarity * spread + rng.normal(0.0, SENTIMENT_SIGMA)
            else:
                valence = mu + rng.normal(0.0, SENTIMENT_SIGMA)
            token = _nearest_valence_token(valence)
            text = f"{_FILLER[rng.integers(len(_FILLER))]} {token}"
            if rank < _POSTS_PER_NEWS:
                ts = published + 1 + int(rng.exponential(1800.0))
                eid = builder.add(user_id(uidx), nid, "post", None, ts, text)
            else:
                pid, pts = all_nodes[rng.integers(len(all_nodes))]
                ts = pts + 1 + int(rng.exponential(3600.0))
                eid = builder.add(user_id(uidx), nid, "reply", pid, ts, text)
            all_nodes.append((eid, ts))

        n_reposts = int(rng.poisson(_REPOST_MEAN * boost))
        for _ in range(n_reposts):
            macro_nodes = builder.macro[nid]
            pid, pts = macro_nodes[rng.integers(len(macro_nodes))]
            ts = pts + 1 + int(rng.exponential(7200.0 / boost))
            uidx = int(general[rng.integers(len(general))])
            builder.add(user_id(uidx), nid, "repost", pid, ts)

    # --- hobby cliques co-engage their targets (class-blind reposts)
    for members, targets in cliques:
        for uidx in members:
            for j in targets:
                nid = news[j].id
                macro_nodes = builder.macro[nid]
                pid, pts = macro_nodes[rng.integers(len(macro_nodes))]
                ts = pts + 1 + int(rng.exponential(7200.0))
                builder.add(user_id(uidx), nid, "repost", pid, ts)

    # --- coordinated block pushes fake items (cluster + class preference)
    push_rate = _BLOCK_PUSH_RATE * cfg.credibility_gap
    fake_sorted = sorted(fake_set)
    if push_rate > 0.0:
        for uidx in np.flatnonzero(is_block):
            mask = rng.random(len(fake_sorted)) < push_rate
            for j, hit in zip(fake_sorted, mask):
                if not hit:
                    continue
                nid = news[j].id
                macro_nodes = builder.macro[nid]
                pid, pts = macro_nodes[rng.integers(len(macro_nodes))]
                ts = pts + 1 + int(rng.exponential(7200.0))
                builder.add(user_id(int(uidx)), nid, "repost", pid, ts)

    dataset = Dataset(news=news, users=users, publishers=publishers,
                      engagements=builder.engagements, friendships=friendships)
    return dataset, ground_truth


def save_ground_truth(ground_truth: dict, path) -> None:
    write_jsonl(path, ({"news_id": nid, "label": lab}
                       for nid, lab in ground_truth.items()))
