"""Hierarchical propagation networks and their structural/temporal features.

Each news item yields a pair of forests: the macro layer (posts and their
repost trees) and the micro layer (reply trees, rooted at the first reply of
each thread). Feature vectors over the pairs feed a fake-vs-real group
comparison based on the Mann-Whitney rank-sum test.
"""

import statistics
from dataclasses import dataclass, field

from wsskit.corpus import Dataset
from wsskit.errors import ComparisonError, NotFound
from wsskit.metrics import mann_whitney_u


@dataclass
class CascadeNode:
    engagement_id: str
    timestamp: int
    user_id: str
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class CascadePair:
    macro: tuple  # forest of posts + reposts
    micro: tuple  # forest of replies


@dataclass(frozen=True)
class PropFeatures:
    macro_size: int
    macro_depth: int
    macro_max_breadth: int
    micro_size: int
    micro_depth: int
    time_to_first_repost: int  # -1 when the item was never reposted
    lifespan: int
    unique_users: int


FEATURE_NAMES = (
    "macro_size", "macro_depth", "macro_max_breadth",
    "micro_size", "micro_depth",
    "time_to_first_repost", "lifespan", "unique_users",
)


def build_cascades(d: Dataset, news_id: str) -> CascadePair:
    """Assemble the macro/micro forests for one news item.

    Posts are macro roots and reposts attach under their parent's macro host
    (the nearest non-reply ancestor). A reply answering a post or repost
    starts a micro tree; a reply answering a reply nests under it. Children
    are ordered by (timestamp, engagement id).
    """
    if news_id not in {n.id for n in d.news}:
        raise NotFound(f"unknown news id: {news_id}")
    engs = [e for e in d.engagements if e.news_id == news_id]
    by_id = {e.id: e for e in engs}
    nodes = {e.id: CascadeNode(e.id, e.timestamp, e.user_id) for e in engs}

    def macro_host(eng):
        cur = by_id[eng.parent_id]
        while cur.kind == "reply":
            cur = by_id[cur.parent_id]
        return cur.id

    macro_roots, micro_roots = [], []
    for e in engs:
        if e.kind == "post":
            macro_roots.append(nodes[e.id])
        elif e.kind == "repost":
            nodes[macro_host(e)].children.append(nodes[e.id])
        else:  # reply
            parent = by_id[e.parent_id]
            if parent.kind == "reply":
                nodes[parent.id].children.append(nodes[e.id])
            else:
                micro_roots.append(nodes[e.id])

    def sort_rec(node):
        node.children.sort(key=lambda c: (c.timestamp, c.engagement_id))
        for child in node.children:
            sort_rec(child)

    key = lambda n: (n.timestamp, n.engagement_id)
    for root in macro_roots + micro_roots:
        sort_rec(root)
    return CascadePair(macro=tuple(sorted(macro_roots, key=key)),
                       micro=tuple(sorted(micro_roots, key=key)))


def _walk(forest):
    """Yield (node, depth) over a forest, iteratively."""
    stack = [(root, 0) for root in forest]
    while stack:
        node, depth = stack.pop()
        yield node, depth
        for child in node.children:
            stack.append((child, depth + 1))


def _forest_stats(forest):
    size = 0
    depth = 0
    level_counts = {}
    for node, d in _walk(forest):
        size += 1
        depth = max(depth, d)
        level_counts[d] = level_counts.get(d, 0) + 1
    breadth = max(level_counts.values(), default=0)
    return size, depth, breadth


def extract_features(c: CascadePair) -> PropFeatures:
    """Compute the eight structural/temporal features of a cascade pair."""
    macro_size, macro_depth, macro_breadth = _forest_stats(c.macro)
    micro_size, micro_depth, _ = _forest_stats(c.micro)

    timestamps = [n.timestamp for n, _ in _walk(c.macro)]
    timestamps += [n.timestamp for n, _ in _walk(c.micro)]
    lifespan = max(timestamps) - min(timestamps) if timestamps else 0

    first_post = min((r.timestamp for r in c.macro), default=None)
    repost_times = [n.timestamp for n, depth in _walk(c.macro) if depth > 0]
    if first_post is not None and repost_times:
        time_to_first_repost = min(repost_times) - first_post
    else:
        time_to_first_repost = -1

    users = {n.user_id for n, _ in _walk(c.macro)} | {n.user_id for n, _ in _walk(c.micro)}
    return PropFeatures(
        macro_size=macro_size,
        macro_depth=macro_depth,
        macro_max_breadth=macro_breadth,
        micro_size=micro_size,
        micro_depth=micro_depth,
        time_to_first_repost=time_to_first_repost,
        lifespan=lifespan,
        unique_users=len(users),
    )


def compare_groups(fake, real) -> dict:
    """Two-sided Mann-Whitney comparison per feature.

    Returns feature -> {statistic, p_value, direction}; direction is the sign
    of median(fake) - median(real).
    """
    if not fake or not real:
        raise ComparisonError("both groups must be non-empty")
    report = {}
    for name in FEATURE_NAMES:
        x = [getattr(f, name) for f in fake]
        y = [getattr(f, name) for f in real]
        u, p = mann_whitney_u(x, y)
        diff = statistics.median(x) - statistics.median(y)
        direction = (diff > 0) - (diff < 0)
        report[name] = {"statistic": u, "p_value": p, "direction": direction}
    return report
