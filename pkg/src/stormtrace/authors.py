"""Author-level influence: aggregated key-post affinity and boost score.

The boost score rewards authors whose reference to a URL is followed, in
later windows, by new distinct authors referencing the same URL. Later
adoptions are weighted by the inverse square of their distance in windows.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from stormtrace.affinity import KeyPost
from stormtrace.corpus import Corpus
from stormtrace.windowing import TimeWindow, earliest_window


@dataclass(frozen=True)
class AuthorInfluence:
    author: str
    aggregated: float
    key_post_urls: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "author": self.author,
            "aggregated": round(self.aggregated, 6),
            "key_post_urls": list(self.key_post_urls),
        }


@dataclass(frozen=True)
class ReferenceEvent:
    author: str
    target_url: str
    window_index: int
    source_url: str = ""


@dataclass(frozen=True)
class AccumSeries:
    post_url: str
    per_window: tuple[int, ...]


@dataclass(frozen=True)
class BoostResult:
    author: str
    boost: float
    event_count: int

    @property
    def average(self) -> float:
        return self.boost / self.event_count

    def to_dict(self) -> dict:
        return {
            "author": self.author,
            "boost": round(self.boost, 6),
            "average": round(self.average, 6),
            "event_count": self.event_count,
        }


def aggregated_influence(key_posts: Iterable[KeyPost], corpus: Corpus) -> list[AuthorInfluence]:
    """Sum key-post scores per author.

    Every election counts, so a post elected in several windows contributes
    each time. Key posts outside the corpus have no known author and are
    skipped.
    """
    totals: dict[str, float] = defaultdict(float)
    urls: dict[str, set[str]] = defaultdict(set)
    for kp in key_posts:
        post = corpus.by_id.get(kp.url)
        if post is None:
            continue
        totals[post.author] += kp.repr
        urls[post.author].add(kp.url)
    out = [AuthorInfluence(a, totals[a], tuple(sorted(urls[a]))) for a in totals]
    out.sort(key=lambda r: (-r.aggregated, r.author))
    return out


def reference_events(corpus: Corpus, windows: Sequence[TimeWindow]) -> list[ReferenceEvent]:
    """One event per (post, referenced URL), placed in the earliest window holding the post."""
    events = []
    for post in corpus.posts:
        slot = earliest_window(windows, post.published_at)
        if slot is None:
            raise ValueError(f"post {post.id} lies outside every window")
        for url in sorted(post.refs):
            events.append(ReferenceEvent(post.author, url, slot, post.id))
    return events


def accumulate(events: Iterable[ReferenceEvent], url: str, n_windows: int) -> AccumSeries:
    """Distinct referencing authors of ``url`` up to and including each window."""
    first_seen: dict[str, int] = {}
    for ev in events:
        if ev.target_url == url:
            first_seen[ev.author] = min(first_seen.get(ev.author, ev.window_index), ev.window_index)
    new_per_window = [0] * n_windows
    for slot in first_seen.values():
        new_per_window[slot] += 1
    series, running = [], 0
    for added in new_per_window:
        running += added
        series.append(running)
    return AccumSeries(url, tuple(series))


def build_accum(corpus: Corpus, windows: Sequence[TimeWindow], url: str) -> AccumSeries:
    return accumulate(reference_events(corpus, windows), url, len(windows))


def reference_score(event: ReferenceEvent, series: AccumSeries) -> float:
    acc = series.per_window
    s = event.window_index
    base = acc[s]
    return sum(((acc[i] - base) / (i - s) ** 2 for i in range(s + 1, len(acc))), 0.0)


def author_boost_scores(corpus: Corpus, windows: Sequence[TimeWindow]) -> list[BoostResult]:
    events = reference_events(corpus, windows)
    by_target: dict[str, list[ReferenceEvent]] = defaultdict(list)
    for ev in events:
        by_target[ev.target_url].append(ev)
    series = {url: accumulate(evs, url, len(windows)) for url, evs in by_target.items()}

    boost: dict[str, float] = defaultdict(float)
    count: dict[str, int] = defaultdict(int)
    for ev in events:
        boost[ev.author] += reference_score(ev, series[ev.target_url])
        count[ev.author] += 1
    out = [BoostResult(a, boost[a], count[a]) for a in boost]
    out.sort(key=lambda r: (-r.boost, r.author))
    return out


def elect_boost_authors(results: Sequence[BoostResult], theta: float = 0.8) -> list[BoostResult]:
    """Authors whose average boost reaches ``theta`` times the best average."""
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if not results:
        return []
    best = max(r.average for r in results)
    return [r for r in results if r.average >= theta * best]
