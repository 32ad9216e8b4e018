"""Exception types shared across the package."""

from __future__ import annotations


class VCKernelError(Exception):
    """Base class for all package errors."""


class InvalidVertexError(VCKernelError, KeyError):
    """A vertex id is unknown or already deleted."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return Exception.__str__(self)


class EdgeStateError(VCKernelError):
    """An edge was added twice, removed while absent, or is a self-loop."""


class InvalidArgumentError(VCKernelError, ValueError):
    """An argument is structurally invalid (for example an empty merge set)."""


class ParseError(VCKernelError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class StaleSiteError(VCKernelError):
    """A rule site no longer satisfies the rule's preconditions."""


class NotApplicableError(VCKernelError):
    """A check-then-commit rule rejected its tentative application."""


class InvalidSolutionError(VCKernelError, ValueError):
    """A supplied vertex set is not a vertex cover of the instance."""


class SnapshotError(VCKernelError):
    """A snapshot token does not belong to this engine or was already released."""
