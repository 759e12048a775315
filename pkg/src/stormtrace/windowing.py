"""Overlapping sliding time windows over a corpus."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from stormtrace.corpus import Corpus, Post
from stormtrace.errors import EmptyCorpus


@dataclass(frozen=True)
class WindowSpec:
    gamma_days: int = 7
    delta_days: int = 1

    def __post_init__(self):
        if self.gamma_days < 1 or self.delta_days < 1:
            raise ValueError("window size and step must be at least one day")
        if self.delta_days > self.gamma_days:
            raise ValueError(
                f"step ({self.delta_days}d) larger than window ({self.gamma_days}d) "
                "would leave posts uncovered"
            )

    @property
    def gamma(self) -> timedelta:
        return timedelta(days=self.gamma_days)

    @property
    def delta(self) -> timedelta:
        return timedelta(days=self.delta_days)


@dataclass(frozen=True)
class TimeWindow:
    """Closed interval ``[start, end]``; ``index`` is 0-based."""

    index: int
    start: datetime
    end: datetime

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts <= self.end


def regular_window_count(span: timedelta, spec: WindowSpec) -> int:
    if span <= spec.gamma:
        return 1
    return (span - spec.gamma) // spec.delta + 1


def make_windows(corpus: Corpus, spec: WindowSpec) -> list[TimeWindow]:
    """Windows start at ``first_at + i*delta``.

    When the last regular window ends before the final post, one extra
    window of the same size is anchored at the corpus end.
    """
    if not len(corpus):
        raise EmptyCorpus("cannot window an empty corpus")
    first, last = corpus.first_at, corpus.last_at
    n = regular_window_count(last - first, spec)
    windows = [
        TimeWindow(i, first + i * spec.delta, first + i * spec.delta + spec.gamma)
        for i in range(n)
    ]
    if windows[-1].end < last:
        windows.append(TimeWindow(n, last - spec.gamma, last))
    return windows


def posts_in_window(corpus: Corpus, window: TimeWindow) -> list[Post]:
    selected = [p for p in corpus.posts if window.contains(p.published_at)]
    selected.sort(key=lambda p: (p.published_at, p.id))
    return selected


def earliest_window(windows: list[TimeWindow], ts: datetime) -> int | None:
    """Index of the first window containing ``ts``, or None."""
    for w in windows:
        if w.contains(ts):
            return w.index
    return None
