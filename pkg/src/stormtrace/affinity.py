"""URL-to-topic affinity scoring and key-post election.

A referenced URL scores high for a topic when many of the topic's posts
cite it (URL frequency) and few other topics of the same window do
(inverse topic frequency, natural log).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Collection, Iterable, Literal, Sequence

from stormtrace.corpus import Corpus, Post
from stormtrace.errors import NotReferenced
from stormtrace.topics import TopicModel

ElectMode = Literal["top", "percent"]


@dataclass(frozen=True)
class AffinityRecord:
    url: str
    window_index: int
    topic: int
    tf: int
    idf: float
    repr: float
    in_corpus: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class KeyPost:
    url: str
    window_index: int
    topic: int
    repr: float
    in_corpus: bool
    author: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> KeyPost:
        return cls(**data)


def _topic_of(model: TopicModel, post: Post) -> int | None:
    return model.assignment.get(post.id)


def url_frequency(url: str, t: int, model: TopicModel, window_posts: Iterable[Post]) -> int:
    """Number of posts in topic ``t`` whose refs contain ``url``."""
    return sum(1 for p in window_posts if _topic_of(model, p) == t and url in p.refs)


def inverse_topic_frequency(url: str, model: TopicModel, window_posts: Iterable[Post]) -> float:
    topics = {
        t for p in window_posts if url in p.refs and (t := _topic_of(model, p)) is not None
    }
    if not topics:
        raise NotReferenced(url)
    return math.log(model.k / len(topics))


def compute_affinities(
    model: TopicModel,
    window_posts: Sequence[Post],
    corpus_ids: Collection[str] | None = None,
) -> list[AffinityRecord]:
    """One record per (url, topic) with a non-zero URL frequency.

    Posts without a topic assignment (no tokens) do not count. When
    ``corpus_ids`` is omitted, ``in_corpus`` is judged against the window's
    own posts. Records are ordered by (topic, url).
    """
    if corpus_ids is None:
        corpus_ids = {p.id for p in window_posts}
    tf: dict[str, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for post in window_posts:
        t = _topic_of(model, post)
        if t is None:
            continue
        for url in post.refs:
            tf[url][t] += 1

    records = []
    for url, per_topic in tf.items():
        idf = math.log(model.k / len(per_topic))
        for t, count in per_topic.items():
            records.append(
                AffinityRecord(
                    url=url,
                    window_index=model.window_index,
                    topic=t,
                    tf=count,
                    idf=idf,
                    repr=count * idf,
                    in_corpus=url in corpus_ids,
                )
            )
    records.sort(key=lambda r: (r.topic, r.url))
    return records


def elect_key_posts(
    records: Iterable[AffinityRecord],
    t: int,
    x: int = 1,
    mode: ElectMode = "top",
    theta: float = 1.0,
    corpus: Corpus | None = None,
) -> list[KeyPost]:
    """Elect the key posts of topic ``t``.

    Only records with a positive score are candidates. ``top`` keeps the
    ``x`` best plus anything tied with the x-th; ``percent`` keeps every
    candidate scoring at least ``theta`` times the best. When two or more
    candidates all share one score nothing is elected, since none stands
    out. Output is ordered by score descending, then URL.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    candidates = sorted(
        (r for r in records if r.topic == t and r.repr > 0),
        key=lambda r: (-r.repr, r.url),
    )
    if not candidates:
        return []
    if len(candidates) >= 2 and len({r.repr for r in candidates}) == 1:
        return []

    if mode == "top":
        cutoff = candidates[min(x, len(candidates)) - 1].repr
        chosen = [r for r in candidates if r.repr >= cutoff]
    elif mode == "percent":
        best = candidates[0].repr
        chosen = [r for r in candidates if r.repr >= theta * best]
    else:
        raise ValueError(f"unknown election mode {mode!r}")

    return [
        KeyPost(
            url=r.url,
            window_index=r.window_index,
            topic=r.topic,
            repr=r.repr,
            in_corpus=r.in_corpus,
            author=corpus.by_id[r.url].author if corpus is not None and r.url in corpus else None,
        )
        for r in chosen
    ]
