"""Data model, validation, and ingestion/export of the social-news corpus.

A corpus directory holds five JSON Lines files (``news.jsonl``,
``users.jsonl``, ``publishers.jsonl``, ``engagements.jsonl``,
``friendships.jsonl``), one record per line, keys in declared field order,
optional fields omitted when absent. Datasets are immutable after
construction and safe to share across workers.
"""

import os
from dataclasses import dataclass, field

from wsskit.errors import NotFound, ParseError, ValidationError
from wsskit.ioutil import read_jsonl, write_jsonl

ENGAGEMENT_KINDS = ("post", "repost", "reply")
LABELS = ("fake", "real")

FILE_NAMES = {
    "news": "news.jsonl",
    "users": "users.jsonl",
    "publishers": "publishers.jsonl",
    "engagements": "engagements.jsonl",
    "friendships": "friendships.jsonl",
}


@dataclass(frozen=True)
class NewsArticle:
    id: str
    publisher_id: str
    text: str
    published_at: int
    clean_label: str | None = None


@dataclass(frozen=True)
class User:
    id: str
    history_texts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "history_texts", tuple(self.history_texts))


@dataclass(frozen=True)
class Publisher:
    id: str
    partisanship: float | None = None


@dataclass(frozen=True)
class Engagement:
    id: str
    user_id: str
    news_id: str
    kind: str
    parent_id: str | None = None
    timestamp: int = 0
    text: str | None = None


@dataclass(frozen=True)
class Dataset:
    news: tuple = field(default=())
    users: tuple = field(default=())
    publishers: tuple = field(default=())
    engagements: tuple = field(default=())
    friendships: tuple = field(default=())

    def __post_init__(self):
        for name in ("news", "users", "publishers", "engagements", "friendships"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(
            self, "friendships", tuple(tuple(pair) for pair in self.friendships)
        )


def news_by_id(d: Dataset) -> dict:
    return {n.id: n for n in d.news}


def engagements_by_news(d: Dataset) -> dict:
    """Group engagements per news id, insertion order preserved."""
    grouped = {n.id: [] for n in d.news}
    for e in d.engagements:
        grouped[e.news_id].append(e)
    return grouped


def validate_dataset(d: Dataset) -> None:
    """Check every referential and structural invariant; raise on the first
    violation, naming the offending id."""
    pub_ids = set()
    for p in d.publishers:
        if p.id in pub_ids:
            raise ValidationError(f"duplicate publisher id: {p.id}")
        pub_ids.add(p.id)
        if p.partisanship is not None and not -1.0 <= p.partisanship <= 1.0:
            raise ValidationError(f"partisanship out of [-1,1] for publisher {p.id}")

    user_ids = set()
    for u in d.users:
        if u.id in user_ids:
            raise ValidationError(f"duplicate user id: {u.id}")
        user_ids.add(u.id)

    news_ids = set()
    for n in d.news:
        if n.id in news_ids:
            raise ValidationError(f"duplicate news id: {n.id}")
        news_ids.add(n.id)
        if not n.text:
            raise ValidationError(f"empty text for news {n.id}")
        if n.publisher_id not in pub_ids:
            raise ValidationError(f"unknown publisher_id {n.publisher_id!r} for news {n.id}")
        if not isinstance(n.published_at, int) or n.published_at < 0:
            raise ValidationError(f"published_at must be a non-negative integer for news {n.id}")
        if n.clean_label is not None and n.clean_label not in LABELS:
            raise ValidationError(f"clean_label must be fake/real for news {n.id}")

    by_id = {}
    for e in d.engagements:
        if e.id in by_id:
            raise ValidationError(f"duplicate engagement id: {e.id}")
        by_id[e.id] = e
        if e.user_id not in user_ids:
            raise ValidationError(f"unknown user_id {e.user_id!r} for engagement {e.id}")
        if e.news_id not in news_ids:
            raise ValidationError(f"unknown news_id {e.news_id!r} for engagement {e.id}")
        if e.kind not in ENGAGEMENT_KINDS:
            raise ValidationError(f"unknown kind {e.kind!r} for engagement {e.id}")
        if e.kind == "post":
            if e.parent_id is not None:
                raise ValidationError(f"post must not have parent_id: engagement {e.id}")
        elif e.parent_id is None:
            raise ValidationError(f"{e.kind} requires parent_id: engagement {e.id}")
        if not isinstance(e.timestamp, int) or e.timestamp < 0:
            raise ValidationError(f"timestamp must be a non-negative integer for engagement {e.id}")

    for e in d.engagements:
        if e.parent_id is None:
            continue
        parent = by_id.get(e.parent_id)
        if parent is None:
            raise ValidationError(f"unknown parent_id {e.parent_id!r} for engagement {e.id}")
        if parent.news_id != e.news_id:
            raise ValidationError(f"parent of engagement {e.id} is on a different news item")
        if e.timestamp < parent.timestamp:
            raise ValidationError(f"engagement {e.id} predates its parent")

    # Every parent chain must terminate at a post on the same news (no cycles).
    for e in d.engagements:
        seen = {e.id}
        cur = e
        while cur.parent_id is not None:
            cur = by_id[cur.parent_id]
            if cur.id in seen:
                raise ValidationError(f"parent chain cycle at engagement {e.id}")
            seen.add(cur.id)
        if cur.kind != "post":
            raise ValidationError(f"parent chain of engagement {e.id} does not end at a post")

    seen_pairs = set()
    for pair in d.friendships:
        if len(pair) != 2:
            raise ValidationError(f"friendship must be a pair: {pair!r}")
        a, b = pair
        if a == b:
            raise ValidationError(f"self-friendship for user {a}")
        for uid in (a, b):
            if uid not in user_ids:
                raise ValidationError(f"unknown user {uid!r} in friendship")
        key = (a, b) if a <= b else (b, a)
        if key in seen_pairs:
            raise ValidationError(f"duplicate friendship pair {key}")
        seen_pairs.add(key)


def _require(obj, key, types, path, lineno, optional=False):
    if key not in obj:
        if optional:
            return None
        raise ParseError(f"missing field {key!r}", path=path, line=lineno)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise ParseError(f"field {key!r} has wrong type", path=path, line=lineno)
    return value


def _check_keys(obj, allowed, path, lineno):
    extra = set(obj) - set(allowed)
    if extra:
        raise ParseError(f"unexpected fields {sorted(extra)}", path=path, line=lineno)


def load_dataset(path) -> Dataset:
    """Load and validate a corpus directory.

    Raises OSError for missing files, ParseError (with file and line) for
    malformed records, and ValidationError for invariant violations.
    """
    paths = {k: os.path.join(path, v) for k, v in FILE_NAMES.items()}
    for p in paths.values():
        if not os.path.exists(p):
            raise FileNotFoundError(f"missing corpus file: {p}")

    news = []
    for lineno, obj in read_jsonl(paths["news"]):
        _check_keys(obj, ("id", "publisher_id", "text", "published_at", "clean_label"),
                    paths["news"], lineno)
        news.append(NewsArticle(
            id=_require(obj, "id", str, paths["news"], lineno),
            publisher_id=_require(obj, "publisher_id", str, paths["news"], lineno),
            text=_require(obj, "text", str, paths["news"], lineno),
            published_at=_require(obj, "published_at", int, paths["news"], lineno),
            clean_label=_require(obj, "clean_label", str, paths["news"], lineno, optional=True),
        ))

    users = []
    for lineno, obj in read_jsonl(paths["users"]):
        _check_keys(obj, ("id", "history_texts"), paths["users"], lineno)
        history = _require(obj, "history_texts", list, paths["users"], lineno)
        if any(not isinstance(t, str) for t in history):
            raise ParseError("history_texts must be strings", path=paths["users"], line=lineno)
        users.append(User(id=_require(obj, "id", str, paths["users"], lineno),
                          history_texts=tuple(history)))

    publishers = []
    for lineno, obj in read_jsonl(paths["publishers"]):
        _check_keys(obj, ("id", "partisanship"), paths["publishers"], lineno)
        part = _require(obj, "partisanship", (int, float), paths["publishers"], lineno,
                        optional=True)
        publishers.append(Publisher(
            id=_require(obj, "id", str, paths["publishers"], lineno),
            partisanship=None if part is None else float(part),
        ))

    engagements = []
    for lineno, obj in read_jsonl(paths["engagements"]):
        _check_keys(obj, ("id", "user_id", "news_id", "kind", "parent_id", "timestamp", "text"),
                    paths["engagements"], lineno)
        engagements.append(Engagement(
            id=_require(obj, "id", str, paths["engagements"], lineno),
            user_id=_require(obj, "user_id", str, paths["engagements"], lineno),
            news_id=_require(obj, "news_id", str, paths["engagements"], lineno),
            kind=_require(obj, "kind", str, paths["engagements"], lineno),
            parent_id=_require(obj, "parent_id", str, paths["engagements"], lineno, optional=True),
            timestamp=_require(obj, "timestamp", int, paths["engagements"], lineno),
            text=_require(obj, "text", str, paths["engagements"], lineno, optional=True),
        ))

    friendships = []
    for lineno, obj in read_jsonl(paths["friendships"]):
        _check_keys(obj, ("a", "b"), paths["friendships"], lineno)
        friendships.append((
            _require(obj, "a", str, paths["friendships"], lineno),
            _require(obj, "b", str, paths["friendships"], lineno),
        ))

    d = Dataset(news=news, users=users, publishers=publishers,
                engagements=engagements, friendships=friendships)
    validate_dataset(d)
    return d


def _news_record(n: NewsArticle) -> dict:
    rec = {"id": n.id, "publisher_id": n.publisher_id, "text": n.text,
           "published_at": n.published_at}
    if n.clean_label is not None:
        rec["clean_label"] = n.clean_label
    return rec


def _engagement_record(e: Engagement) -> dict:
    rec = {"id": e.id, "user_id": e.user_id, "news_id": e.news_id, "kind": e.kind}
    if e.parent_id is not None:
        rec["parent_id"] = e.parent_id
    rec["timestamp"] = e.timestamp
    if e.text is not None:
        rec["text"] = e.text
    return rec


def save_dataset(d: Dataset, path) -> None:
    """Write the five corpus files atomically, in canonical key order."""
    os.makedirs(path, exist_ok=True)
    write_jsonl(os.path.join(path, FILE_NAMES["news"]), (_news_record(n) for n in d.news))
    write_jsonl(os.path.join(path, FILE_NAMES["users"]),
                ({"id": u.id, "history_texts": list(u.history_texts)} for u in d.users))
    write_jsonl(
        os.path.join(path, FILE_NAMES["publishers"]),
        ({"id": p.id} if p.partisanship is None
         else {"id": p.id, "partisanship": p.partisanship} for p in d.publishers),
    )
    write_jsonl(os.path.join(path, FILE_NAMES["engagements"]),
                (_engagement_record(e) for e in d.engagements))
    write_jsonl(os.path.join(path, FILE_NAMES["friendships"]),
                ({"a": a, "b": b} for a, b in d.friendships))


def engagers_of(d: Dataset, news_id: str) -> list:
    """Unique engaging users, ordered by first engagement time then user id."""
    if news_id not in {n.id for n in d.news}:
        raise NotFound(f"unknown news id: {news_id}")
    first_seen = {}
    for e in d.engagements:
        if e.news_id != news_id:
            continue
        if e.user_id not in first_seen or e.timestamp < first_seen[e.user_id]:
            first_seen[e.user_id] = e.timestamp
    return sorted(first_seen, key=lambda uid: (first_seen[uid], uid))
