"""Exception types shared across the package."""

from __future__ import annotations


class EstimeError(Exception):
    """Base class for all estime-specific errors."""


class ConfigurationError(EstimeError):
    """A configuration value is invalid or out of range for the backend."""


class InputSizeError(EstimeError):
    """A model input would exceed the backend's hard input limit."""


class EmptyTextError(EstimeError):
    """Matching was requested against an empty text."""


class EmbeddingPassError(EstimeError):
    """A backend call failed while filling the embedding table.

    The message identifies the failing pass; the original error is chained.
    """


class DegenerateInputError(EstimeError):
    """A correlation statistic is undefined for the given input."""


class IncompleteGridError(EstimeError):
    """A (system, item) score grid has missing or duplicated cells."""

    def __init__(self, message: str, missing=(), duplicates=()):
        super().__init__(message)
        self.missing = list(missing)
        self.duplicates = list(duplicates)


class InsufficientPositionsError(EstimeError):
    """A summary has fewer eligible positions than requested errors."""


class NoCandidateError(EstimeError):
    """No valid replacement candidate found, even after deepening."""


class MalformedLineError(EstimeError):
    """A JSONL line failed to parse or validate."""

    def __init__(self, path, line_number: int, message: str):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class MissingIdsError(EstimeError):
    """A score file does not cover every pair id."""

    def __init__(self, message: str, missing=()):
        super().__init__(message)
        self.missing = list(missing)
