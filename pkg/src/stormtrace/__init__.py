"""Key-post, key-author and boost-author election over time-windowed post corpora."""

from stormtrace.errors import StormtraceError

__version__ = "0.1.0"

__all__ = ["StormtraceError", "__version__"]
