"""Synthetic post corpora with planted topics and planted viral links."""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

TOPIC_WORDS = {
    "billing": (
        "invoice charge refund payment bill fee overcharge subscription credit "
        "balance statement pricing discount renewal card receipt plan tariff "
        "cancellation deposit"
    ).split(),
    "outage": (
        "network server outage downtime connection router signal restore latency "
        "engineer tower fiber broadband modem disruption maintenance bandwidth "
        "cable wireless coverage"
    ).split(),
    "device": (
        "phone camera battery screen design launch model feature upgrade display "
        "processor charger speaker keyboard tablet hardware firmware sensor "
        "headphone storage"
    ).split(),
}
_FILLER = "the and of to is it this that was for with on really".split()
AUTHORS = [
    "ada", "bram", "chen", "dara", "eli", "fumiko", "gus", "hana", "ivo", "jun",
]
START = datetime(2015, 3, 1, tzinfo=timezone.utc)
_OFFSETS = [timezone.utc, timezone(timedelta(hours=2)), timezone(timedelta(hours=-5))]


def _content(rng: random.Random, topic: str, n_words: int) -> str:
    vocab = TOPIC_WORDS[topic]
    words = [rng.choice(vocab) for _ in range(n_words)]
    for _ in range(n_words // 5):
        words.insert(rng.randrange(len(words) + 1), rng.choice(_FILLER))
    text = " ".join(words)
    return text[0].upper() + text[1:] + rng.choice([".", "!", "?!", "..."])


def _stamp(rng: random.Random, ts: datetime) -> str:
    return ts.astimezone(rng.choice(_OFFSETS)).isoformat()


def _spell(rng: random.Random, url: str) -> str:
    """Return a non-canonical but equivalent spelling some of the time."""
    roll = rng.random()
    if roll < 0.15:
        return url.replace("https://", "HTTPS://").replace("forum.example.com", "Forum.Example.com")
    if roll < 0.3:
        return url + "?utm_source=feed&utm_medium=rss"
    if roll < 0.4:
        return url + "#comments"
    return url


def generate_posts(seed: int = 42, n_posts: int = 30, days: int = 10) -> list[dict]:
    """Posts over ``days`` days in three planted topics.

    Each topic has one external story most of its posts cite, a few one-off
    links, and replies citing earlier posts of the same topic.
    """
    rng = random.Random(seed)
    topics = sorted(TOPIC_WORDS)
    stories = {t: f"https://news.example.org/{t}-story" for t in topics}
    history: dict[str, list[str]] = {t: [] for t in topics}
    times = sorted(
        START + timedelta(seconds=rng.randrange(days * 86400)) for _ in range(n_posts - 1)
    )
    times = [START] + times
    records = []
    for i, ts in enumerate(times):
        topic = topics[i % len(topics)] if i < len(topics) else rng.choice(topics)
        post_id = f"https://forum.example.com/t/{topic}/{i}"
        refs = []
        if rng.random() < 0.6:
            refs.append(_spell(rng, stories[topic]))
        if history[topic] and rng.random() < 0.5:
            refs.append(_spell(rng, rng.choice(history[topic])))
        if rng.random() < 0.3:
            refs.append(f"https://blog.example.net/{topic}/{rng.randrange(1000)}")
        if rng.random() < 0.1:
            other = rng.choice([t for t in topics if t != topic])
            refs.append(stories[other])
        records.append(
            {
                "id": _spell(rng, post_id),
                "content": _content(rng, topic, rng.randint(25, 40)),
                "author": rng.choice(AUTHORS),
                "date": _stamp(rng, ts),
                "refs": refs,
            }
        )
        history[topic].append(post_id)
    return records


def generate_viral_posts(seed: int = 42) -> tuple[list[dict], str, list[str]]:
    """Two planted topics of eight posts each inside two days.

    Six of the eight ``billing`` posts cite one story; nothing else cites it.
    Returns (records, viral url, ids of the planted topic's posts).
    """
    rng = random.Random(seed)
    viral = "https://news.example.org/billing-scandal"
    records, planted = [], []
    for i in range(16):
        topic = "billing" if i < 8 else "outage"
        post_id = f"https://forum.example.com/t/{topic}/{i}"
        if topic == "billing":
            planted.append(post_id)
            refs = [viral] if i < 6 else [f"https://blog.example.net/billing/{i}"]
        else:
            refs = [f"https://blog.example.net/outage/{i}"]
        records.append(
            {
                "id": post_id,
                "content": _content(rng, topic, 40),
                "author": AUTHORS[i % len(AUTHORS)],
                "date": _stamp(rng, START + timedelta(hours=3 * i)),
                "refs": refs,
            }
        )
    rng.shuffle(records)
    return records, viral, planted


def write_jsonl(records: list[dict], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    return path


def bundled_fixture_path() -> Path:
    """The 30-post corpus shipped with the package (``gen-fixture --seed 42``)."""
    return Path(str(resources.files("stormtrace").joinpath("data/fixture_posts.jsonl")))
