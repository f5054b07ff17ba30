"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, and the service maps them
onto distinct HTTP statuses, so keep the hierarchy flat and explicit.
"""

from __future__ import annotations


class MinsymError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MinsymError, ValueError):
    """A value violates a domain precondition (bad index, mismatched spaces, ...)."""


class FormatError(MinsymError, ValueError):
    """A file or record does not conform to one of the documented formats."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}: "
        if line is not None:
            loc = f"{loc}line {line}: "
        super().__init__(f"{loc}{message}")
        self.path = path
        self.line = line


class BucketPurityError(MinsymError):
    """A stored instance re-solves to a different bucket than its key."""

    def __init__(self, message: str, *, record_id: int, expected: int, actual: int | None):
        super().__init__(message)
        self.record_id = record_id
        self.expected = expected
        self.actual = actual


class PartialSampleError(MinsymError):
    """Controlled sampling ran out of attempts before filling every tracked bucket.

    Carries the partial dataset and the full outcome histogram so callers can
    see which buckets are rare.
    """

    def __init__(self, message: str, *, dataset, histogram: dict):
        super().__init__(message)
        self.dataset = dataset
        self.histogram = histogram
