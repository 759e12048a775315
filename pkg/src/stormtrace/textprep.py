"""Post content cleaning, stop-word removal and stemming."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from stormtrace.corpus import Post
from stormtrace.porter import stem

__all__ = ["StopwordList", "TokenizedPost", "clean", "stem", "tokenize_post"]

_URL_RE = re.compile(r"(?:\b[a-z][a-z0-9+.\-]*://|\bwww\.)\S*", re.IGNORECASE)


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))

    def __contains__(self, word: object) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    @cached_property
    def blocked(self) -> frozenset[str]:
        """Stop words together with their stems."""
        return self.words | {stem(w) for w in self.words if w.isalpha()}

    @classmethod
    def parse(cls, text: str) -> StopwordList:
        words = set()
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
        return cls(frozenset(words))

    @classmethod
    def load(cls, path: str | Path) -> StopwordList:
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> StopwordList:
        """The bundled 570-word SMART English stop list."""
        text = (
            resources.files("stormtrace")
            .joinpath("data/smart_stopwords.txt")
            .read_text(encoding="utf-8")
        )
        return cls.parse(text)


@dataclass(frozen=True)
class TokenizedPost:
    post_id: str
    tokens: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


def clean(content: str) -> str:
    """Lowercase ``content`` and reduce it to letters separated by single spaces.

    Embedded URLs are dropped entirely; digits, punctuation and control
    characters become separators.
    """
    text = _URL_RE.sub(" ", content.lower())
    return " ".join("".join(ch if ch.isalpha() else " " for ch in text).split())


def tokenize_post(post: Post, stops: StopwordList) -> TokenizedPost:
    """Stop words are dropped before stemming; a stem that lands on a stop
    word (``thanking`` -> ``thank``) is dropped as well."""
    stems = (stem(w) for w in clean(post.content).split() if w not in stops)
    return TokenizedPost(post.id, tuple(t for t in stems if t not in stops.blocked))
