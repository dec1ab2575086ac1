import hashlib
import os

import pytest
from hypothesis import given, settings, strategies as st

from wsskit import corpus
from wsskit.corpus import Dataset, Engagement, NewsArticle, Publisher, User
from wsskit.errors import NotFound, ParseError, ValidationError

from conftest import build_dataset


def _dir_hash(path):
    digest = hashlib.sha256()
    for name in sorted(os.listdir(path)):
        with open(os.path.join(path, name), "rb") as fh:
            digest.update(name.encode())
            digest.update(fh.read())
    return digest.hexdigest()


def test_empty_files_load_to_empty_dataset(tmp_path):
    for name in corpus.FILE_NAMES.values():
        (tmp_path / name).write_text("")
    d = corpus.load_dataset(tmp_path)
    assert d == Dataset()


def test_empty_dataset_saves_zero_byte_files(tmp_path):
    corpus.save_dataset(Dataset(), tmp_path)
    for name in corpus.FILE_NAMES.values():
        assert (tmp_path / name).stat().st_size == 0


def test_unknown_publisher_rejected():
    d = build_dataset(
        news=[NewsArticle(id="n1", publisher_id="ghost", text="x", published_at=0)],
        publishers=[Publisher(id="p1")])
    with pytest.raises(ValidationError, match="publisher_id"):
        corpus.validate_dataset(d)


def test_fixture_round_trips_byte_identically(fixture_corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    corpus.save_dataset(fixture_corpus, a)
    loaded = corpus.load_dataset(a)
    assert loaded == fixture_corpus
    corpus.save_dataset(loaded, b)
    assert _dir_hash(a) == _dir_hash(b)


def test_save_is_deterministic(fixture_corpus, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    corpus.save_dataset(fixture_corpus, a)
    corpus.save_dataset(fixture_corpus, b)
    assert _dir_hash(a) == _dir_hash(b)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        corpus.load_dataset(tmp_path)


def test_malformed_line_reports_file_and_line(tmp_path):
    for name in corpus.FILE_NAMES.values():
        (tmp_path / name).write_text("")
    (tmp_path / "news.jsonl").write_text('{"id": "n1"}\nnot json\n')
    with pytest.raises(ParseError) as err:
        corpus.load_dataset(tmp_path)
    assert "news.jsonl" in str(err.value)
    assert err.value.line == 1  # first line is already missing fields


def test_parse_error_line_number(tmp_path):
    for name in corpus.FILE_NAMES.values():
        (tmp_path / name).write_text("")
    (tmp_path / "users.jsonl").write_text('{"id": "u1", "history_texts": []}\n{bad\n')
    with pytest.raises(ParseError) as err:
        corpus.load_dataset(tmp_path)
    assert err.value.line == 2


def test_engagement_kind_checked():
    eng = Engagement(id="e1", user_id="u1", news_id="n1", kind="dance", timestamp=0)
    d = build_dataset(
        news=[NewsArticle(id="n1", publisher_id="p1", text="x", published_at=0)],
        users=[User(id="u1")], publishers=[Publisher(id="p1")], engagements=[eng])
    with pytest.raises(ValidationError, match="kind"):
        corpus.validate_dataset(d)


def _one_news(*engagements):
    users = sorted({e.user_id for e in engagements})
    return build_dataset(
        news=[NewsArticle(id="n1", publisher_id="p1", text="x", published_at=0)],
        users=[User(id=u) for u in users],
        publishers=[Publisher(id="p1")],
        engagements=list(engagements))


def test_repost_requires_resolving_parent_on_same_news():
    d = build_dataset(
        news=[NewsArticle(id="n1", publisher_id="p1", text="x", published_at=0),
              NewsArticle(id="n2", publisher_id="p1", text="y", published_at=0)],
        users=[User(id="u1")], publishers=[Publisher(id="p1")],
        engagements=[
            Engagement(id="e1", user_id="u1", news_id="n1", kind="post", timestamp=0),
            Engagement(id="e2", user_id="u1", news_id="n2", kind="repost",
                       parent_id="e1", timestamp=1),
        ])
    with pytest.raises(ValidationError, match="different news"):
        corpus.validate_dataset(d)


def test_post_with_parent_rejected():
    d = _one_news(
        Engagement(id="e1", user_id="u1", news_id="n1", kind="post", timestamp=0),
        Engagement(id="e2", user_id="u1", news_id="n1", kind="post", parent_id="e1",
                   timestamp=1))
    with pytest.raises(ValidationError, match="post"):
        corpus.validate_dataset(d)


def test_child_before_parent_rejected():
    d = _one_news(
        Engagement(id="e1", user_id="u1", news_id="n1", kind="post", timestamp=10),
        Engagement(id="e2", user_id="u1", news_id="n1", kind="reply", parent_id="e1",
                   timestamp=5))
    with pytest.raises(ValidationError, match="predates"):
        corpus.validate_dataset(d)


def test_parent_cycle_detected():
    d = _one_news(
        Engagement(id="e1", user_id="u1", news_id="n1", kind="repost", parent_id="e2",
                   timestamp=0),
        Engagement(id="e2", user_id="u1", news_id="n1", kind="repost", parent_id="e1",
                   timestamp=0))
    with pytest.raises(ValidationError, match="cycle"):
        corpus.validate_dataset(d)


def test_friendship_rules():
    base = dict(news=[], publishers=[], engagements=[],
                users=[User(id="u1"), User(id="u2")])
    with pytest.raises(ValidationError, match="self"):
        corpus.validate_dataset(build_dataset(friendships=[("u1", "u1")], **base))
    with pytest.raises(ValidationError, match="duplicate friendship"):
        corpus.validate_dataset(
            build_dataset(friendships=[("u1", "u2"), ("u2", "u1")], **base))


def test_engagers_of_empty(fixture_corpus):
    assert corpus.engagers_of(fixture_corpus, "n3") == ["u3"]
    d = build_dataset(news=[NewsArticle(id="n1", publisher_id="p1", text="x",
                                        published_at=0)],
                      publishers=[Publisher(id="p1")])
    assert corpus.engagers_of(d, "n1") == []


def test_engagers_of_orders_by_first_timestamp():
    d = _one_news(
        Engagement(id="e1", user_id="B", news_id="n1", kind="post", timestamp=5),
        Engagement(id="e2", user_id="A", news_id="n1", kind="post", timestamp=2),
        Engagement(id="e3", user_id="A", news_id="n1", kind="post", timestamp=9))
    assert corpus.engagers_of(d, "n1") == ["A", "B"]


def test_engagers_of_tie_breaks_lexicographically():
    d = _one_news(
        Engagement(id="e1", user_id="zed", news_id="n1", kind="post", timestamp=7),
        Engagement(id="e2", user_id="amy", news_id="n1", kind="post", timestamp=7))
    assert corpus.engagers_of(d, "n1") == ["amy", "zed"]


def test_engagers_of_unknown_news(fixture_corpus):
    with pytest.raises(NotFound):
        corpus.engagers_of(fixture_corpus, "nope")


# --- property: round-trip over generated datasets ---

_ids = st.text(alphabet="abcdefgh0123456789_-", min_size=1, max_size=8)


@st.composite
def datasets(draw):
    pub_ids = draw(st.lists(_ids, min_size=1, max_size=3, unique=True))
    user_ids = draw(st.lists(_ids, min_size=1, max_size=5, unique=True))
    news_ids = draw(st.lists(_ids, min_size=0, max_size=4, unique=True))
    publishers = [Publisher(id=p, partisanship=draw(st.one_of(
        st.none(), st.floats(-1, 1, allow_nan=False)))) for p in pub_ids]
    users = [User(id=u, history_texts=tuple(draw(st.lists(st.text(max_size=12),
                                                          max_size=2))))
             for u in user_ids]
    news = [NewsArticle(id=n, publisher_id=draw(st.sampled_from(pub_ids)),
                        text=draw(st.text(min_size=1, max_size=20)),
                        published_at=draw(st.integers(0, 10**6)),
                        clean_label=draw(st.sampled_from(["fake", "real", None])))
            for n in news_ids]
    engagements = []
    for n in news_ids:
        chain = draw(st.integers(0, 3))
        prev = None
        ts = draw(st.integers(0, 100))
        for k in range(chain):
            kind = "post" if prev is None else draw(st.sampled_from(["repost", "reply"]))
            eid = f"e-{n}-{k}"
            engagements.append(Engagement(
                id=eid, user_id=draw(st.sampled_from(user_ids)), news_id=n, kind=kind,
                parent_id=prev, timestamp=ts,
                text=draw(st.one_of(st.none(), st.text(max_size=10)))))
            prev = eid
            ts += draw(st.integers(0, 50))
    pairs = draw(st.lists(st.tuples(st.sampled_from(user_ids),
                                    st.sampled_from(user_ids)), max_size=4))
    seen, friendships = set(), []
    for a, b in pairs:
        key = (min(a, b), max(a, b))
        if a != b and key not in seen:
            seen.add(key)
            friendships.append(key)
    return build_dataset(news=news, users=users, publishers=publishers,
                         engagements=engagements, friendships=friendships)


@settings(max_examples=40, deadline=None)
@given(datasets())
def test_roundtrip_property(tmp_path_factory, d):
    corpus.validate_dataset(d)
    tmp = tmp_path_factory.mktemp("rt")
    corpus.save_dataset(d, tmp)
    assert corpus.load_dataset(tmp) == d
