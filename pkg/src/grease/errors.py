"""Exception types shared across the package."""

from __future__ import annotations


class GreaseError(Exception):
    """Base class for all errors raised by this package."""


class LoadError(GreaseError):
    """Malformed or unusable input data.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class UnknownEntityError(GreaseError):
    """An entity label or id does not exist in the graph."""

    def __init__(self, message: str, label: str | None = None):
        super().__init__(message)
        self.label = label


class IndexFormatError(GreaseError):
    """A persisted index stream is not readable (bad magic, version, or truncation)."""


class NoFacetsError(GreaseError):
    """The example set yields neither meta-path nor property facets."""


class GenerationError(GreaseError):
    """A synthetic-benchmark specification is unsatisfiable or self-check failed."""
