"""Exception types shared across the package."""


class MedforestError(Exception):
    """Base class for errors raised by this package."""


class GuardExceededError(MedforestError):
    """An exhaustive routine was asked to scan more work than its guard allows.

    Carries the offending count so callers (and the CLI) can report it.
    """

    def __init__(self, message: str, count: int, limit: int):
        super().__init__(message)
        self.count = count
        self.limit = limit


class UnsplitInfeasibleError(MedforestError):
    """A demand exceeds vehicle capacity, so unsplit service is impossible."""


class ParseError(MedforestError):
    """Malformed input file. Records the source and line when known."""

    def __init__(self, message: str, source: str = "", line: int | None = None):
        loc = source
        if line is not None:
            loc = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.source = source
        self.line = line
