"""Shared exception hierarchy.

Concrete error types live next to the code that raises them; everything
inherits from TelurefError so callers (and the CLI exit-code mapping) can
catch package failures in one clause.
"""


class TelurefError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TelurefError):
    """Input failed a structural or domain check (CLI exit code 2)."""
