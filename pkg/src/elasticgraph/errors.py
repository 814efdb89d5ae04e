"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class ElasticGraphError(Exception):
    """Base class for all package errors."""


class InputError(ElasticGraphError):
    """Bad input data; the CLI maps it to exit code 2."""


class GraphParseError(InputError):
    """A shape-graph document could not be parsed."""


class GraphDataError(InputError):
    """A parsed document is inconsistent (unknown ids, endpoint mismatch)."""


class ArgumentError(ElasticGraphError, ValueError):
    """A parameter is outside its allowed range."""


class DegenerateInputError(ElasticGraphError, ValueError):
    """Zero-length curves or coincident endpoints."""


class PreconditionError(ElasticGraphError):
    """An operation was called on input that violates its precondition."""


class SizeError(ElasticGraphError):
    """Problem too large for an exact method."""
