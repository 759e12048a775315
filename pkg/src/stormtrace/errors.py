"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations


class StormtraceError(Exception):
    """Base class for every error raised by this package."""


class IngestError(StormtraceError):
    """An input record or file row could not be ingested.

    ``line`` is the 1-based line number in the input file, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


class MalformedUrl(IngestError, ValueError):
    pass


class RedirectCycle(IngestError):
    pass


class MissingField(IngestError):
    pass


class BadTimestamp(IngestError):
    pass


class EmptyCorpus(StormtraceError):
    pass


class EmptyWindow(StormtraceError):
    pass


class DegenerateKWarning(UserWarning):
    """More topics were requested than there are documents to fit."""


class TopicOutOfRange(StormtraceError, IndexError):
    pass


class NotReferenced(StormtraceError, KeyError):
    pass


class CountConservationError(StormtraceError, AssertionError):
    """Gibbs sampler count tables drifted from the token total."""
