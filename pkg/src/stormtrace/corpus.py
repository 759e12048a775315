"""Corpus loading and URL canonicalization.

Every post is identified by its URL, so two spellings of the same address
(case differences in the host, default ports, fragments, tracking
parameters, shortened links) must collapse to one identifier before any
counting happens downstream.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping
from urllib.parse import urlsplit, urlunsplit

from stormtrace.errors import (
    BadTimestamp,
    IngestError,
    MalformedUrl,
    MissingField,
    RedirectCycle,
)

logger = logging.getLogger(__name__)

MAX_REDIRECT_HOPS = 10
REQUIRED_FIELDS = ("id", "content", "author", "date", "refs")
_DEFAULT_PORTS = {"http": 80, "https": 443}


def normalize_url(raw: str) -> str:
    """Return the canonical spelling of ``raw``.

    Lowercases scheme and host, drops the fragment, default ports, a bare
    ``/`` path and ``utm_*`` query parameters. Every other query parameter
    is kept verbatim and in order. Commas are percent-encoded so canonical
    URLs can be written to CSV unquoted.
    """
    if not isinstance(raw, str) or not raw.strip():
        raise MalformedUrl(f"not a URL: {raw!r}")
    text = raw.strip()
    try:
        parts = urlsplit(text)
        port = parts.port
    except ValueError as exc:
        raise MalformedUrl(f"cannot parse URL {raw!r}: {exc}") from None
    scheme = parts.scheme.lower()
    host = parts.hostname
    if not scheme or not parts.netloc or not host:
        raise MalformedUrl(f"URL lacks scheme://host: {raw!r}")
    if any(ch.isspace() for ch in text):
        raise MalformedUrl(f"URL contains whitespace: {raw!r}")

    if ":" in host:  # IPv6 literal
        host = f"[{host}]"
    netloc = host
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc = f"{host}:{port}"
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += f":{parts.password}"
        netloc = f"{userinfo}@{netloc}"

    path = parts.path
    if path == "/":
        path = ""
    query = "&".join(
        pair
        for pair in parts.query.split("&")
        if pair and not pair.split("=", 1)[0].lower().startswith("utm_")
    )
    url = urlunsplit((scheme, netloc, path, query, ""))
    return url.replace(",", "%2C")


@dataclass(frozen=True)
class RedirectMap:
    """Offline shortened-link table: source URL -> destination URL.

    Keys and values are stored canonicalized.
    """

    entries: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> RedirectMap:
        return cls({normalize_url(src): normalize_url(dst) for src, dst in pairs})

    @classmethod
    def load(cls, path: str | Path) -> RedirectMap:
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise IngestError(
                        "redirect map rows must be source<TAB>destination", lineno
                    )
                try:
                    pairs.append((normalize_url(cols[0]), normalize_url(cols[1])))
                except MalformedUrl as exc:
                    exc.line = lineno
                    raise
        return cls(dict(pairs))

    def __len__(self) -> int:
        return len(self.entries)


def resolve_redirects(url: str, redirects: RedirectMap | None) -> str:
    """Follow ``redirects`` from ``url`` until no entry matches.

    At most ``MAX_REDIRECT_HOPS`` hops are followed. Raises RedirectCycle
    if the chain revisits a URL.
    """
    current = normalize_url(url)
    if not redirects:
        return current
    seen = {current}
    for _ in range(MAX_REDIRECT_HOPS):
        nxt = redirects.entries.get(current)
        if nxt is None:
            break
        nxt = normalize_url(nxt)
        if nxt in seen:
            raise RedirectCycle(f"redirect cycle through {nxt}")
        seen.add(nxt)
        current = nxt
    return current


@dataclass(frozen=True)
class Post:
    id: str
    content: str
    author: str
    published_at: datetime
    refs: frozenset[str] = frozenset()

    def to_record(self) -> dict:
        return {
            "author": self.author,
            "content": self.content,
            "date": format_timestamp(self.published_at),
            "id": self.id,
            "refs": sorted(self.refs),
        }


@dataclass(frozen=True)
class Corpus:
    """Posts ordered by (published_at, id)."""

    posts: tuple[Post, ...]
    by_id: Mapping[str, Post] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {p.id: p for p in self.posts})

    @classmethod
    def from_posts(cls, posts: Iterable[Post]) -> Corpus:
        return cls(tuple(sorted(posts, key=lambda p: (p.published_at, p.id))))

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self) -> Iterator[Post]:
        return iter(self.posts)

    def __contains__(self, url: object) -> bool:
        return url in self.by_id

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(self.by_id)

    @property
    def first_at(self) -> datetime:
        return min(p.published_at for p in self.posts)

    @property
    def last_at(self) -> datetime:
        return max(p.published_at for p in self.posts)

    @property
    def span_days(self) -> float:
        if not self.posts:
            return 0.0
        return (self.last_at - self.first_at).total_seconds() / 86400.0

    def dumps(self) -> str:
        """Line-delimited serialization; equal corpora give equal strings."""
        return "".join(
            json.dumps(p.to_record(), sort_keys=True, ensure_ascii=False) + "\n"
            for p in self.posts
        )


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: object) -> datetime:
    """Parse an ISO-8601 timestamp carrying a UTC offset; truncate to seconds."""
    if not isinstance(value, str):
        raise BadTimestamp(f"date must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise BadTimestamp(f"unparseable date {value!r}") from None
    if ts.tzinfo is None or ts.utcoffset() is None:
        raise BadTimestamp(f"date {value!r} has no UTC offset")
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def parse_record(
    record: object, redirects: RedirectMap | None = None, line: int | None = None
) -> Post:
    """Validate one decoded input record and build a canonical Post."""
    if not isinstance(record, dict):
        raise IngestError("record is not an object", line)
    missing = [name for name in REQUIRED_FIELDS if name not in record]
    if missing:
        raise MissingField(f"missing field(s): {', '.join(missing)}", line)
    for name in ("id", "content", "author"):
        if not isinstance(record[name], str):
            raise MissingField(f"field {name!r} must be a string", line)
    raw_refs = record["refs"]
    if not isinstance(raw_refs, list) or not all(isinstance(r, str) for r in raw_refs):
        raise MissingField("field 'refs' must be an array of strings", line)
    try:
        published = parse_timestamp(record["date"])
        post_id = resolve_redirects(record["id"], redirects)
        refs = {resolve_redirects(r, redirects) for r in raw_refs}
    except IngestError as exc:
        if exc.line is None:
            exc.line = line
        raise
    refs.discard(post_id)
    return Post(
        id=post_id,
        content=record["content"],
        author=record["author"],
        published_at=published,
        refs=frozenset(refs),
    )


def merge_posts(posts: Iterable[Post]) -> list[Post]:
    """Collapse posts sharing a canonical id.

    The earliest publication wins (content and author come from it; file
    order breaks exact ties) and refs are unioned.
    """
    merged: dict[str, Post] = {}
    for post in posts:
        prev = merged.get(post.id)
        if prev is None:
            merged[post.id] = post
            continue
        keep = post if post.published_at < prev.published_at else prev
        merged[post.id] = Post(
            id=keep.id,
            content=keep.content,
            author=keep.author,
            published_at=keep.published_at,
            refs=(prev.refs | post.refs) - {keep.id},
        )
    return list(merged.values())


def iter_records(path: str | Path) -> Iterator[tuple[int, object]]:
    """Yield (line number, decoded object) for each non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"invalid JSON: {exc.msg}", lineno) from None


def load_corpus(path: str | Path, redirects: RedirectMap | None = None) -> Corpus:
    posts = [parse_record(rec, redirects, lineno) for lineno, rec in iter_records(path)]
    merged = merge_posts(posts)
    if len(merged) < len(posts):
        logger.info("merged %d duplicate records", len(posts) - len(merged))
    return Corpus.from_posts(merged)
