import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wsskit.corpus import Dataset, Engagement, NewsArticle, Publisher, User


def build_dataset(news=(), users=(), publishers=(), engagements=(), friendships=()):
    return Dataset(news=news, users=users, publishers=publishers,
                   engagements=engagements, friendships=friendships)


def simple_corpus(per_news_engagers, texts=None):
    """One post per (news, user) pair; engager map: news id -> list of user ids.

    ``texts`` optionally maps (news_id, user_id) -> engagement text.
    """
    user_ids = sorted({u for us in per_news_engagers.values() for u in us})
    news = [NewsArticle(id=nid, publisher_id="p0", text=f"text {nid}", published_at=0)
            for nid in sorted(per_news_engagers)]
    engs = []
    for nid in sorted(per_news_engagers):
        for k, uid in enumerate(per_news_engagers[nid]):
            text = (texts or {}).get((nid, uid))
            engs.append(Engagement(id=f"e-{nid}-{k}", user_id=uid, news_id=nid,
                                   kind="post", timestamp=k, text=text))
    return build_dataset(news=news, users=[User(id=u) for u in user_ids],
                         publishers=[Publisher(id="p0")], engagements=engs)


@pytest.fixture
def fixture_corpus():
    """3 news / 5 users / 8 engagements, exercising every record shape."""
    news = [
        NewsArticle(id="n1", publisher_id="p1", text="first story", published_at=100,
                    clean_label="fake"),
        NewsArticle(id="n2", publisher_id="p2", text="second story — café",
                    published_at=200, clean_label="real"),
        NewsArticle(id="n3", publisher_id="p1", text="third story", published_at=300),
    ]
    users = [User(id=f"u{i}", history_texts=(f"hello {i}",) if i % 2 else ())
             for i in range(1, 6)]
    publishers = [Publisher(id="p1", partisanship=0.5), Publisher(id="p2")]
    engagements = [
        Engagement(id="e1", user_id="u1", news_id="n1", kind="post", timestamp=110,
                   text="nice one"),
        Engagement(id="e2", user_id="u2", news_id="n1", kind="repost", parent_id="e1",
                   timestamp=120),
        Engagement(id="e3", user_id="u3", news_id="n1", kind="reply", parent_id="e2",
                   timestamp=130, text="not good"),
        Engagement(id="e4", user_id="u4", news_id="n1", kind="reply", parent_id="e3",
                   timestamp=140, text="very bad"),
        Engagement(id="e5", user_id="u2", news_id="n2", kind="post", timestamp=210),
        Engagement(id="e6", user_id="u5", news_id="n2", kind="repost", parent_id="e5",
                   timestamp=260),
        Engagement(id="e7", user_id="u1", news_id="n2", kind="reply", parent_id="e5",
                   timestamp=215, text="meh"),
        Engagement(id="e8", user_id="u3", news_id="n3", kind="post", timestamp=310),
    ]
    friendships = [("u1", "u2"), ("u2", "u3"), ("u4", "u5")]
    return build_dataset(news=news, users=users, publishers=publishers,
                         engagements=engagements, friendships=friendships)
