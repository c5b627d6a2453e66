"""
Toolkit Errors - Exception Hierarchy
====================================
Exceptions raised for malformed input and violated preconditions.
A negative answer to a check is never an exception: checkers return
a failing Report carrying a counterexample instead.
"""

from typing import Any, Optional, Tuple


class DblFibError(Exception):
    """Base class for every error raised by the toolkit"""


class SchemaError(DblFibError):
    """Malformed document: dangling ids, duplicates, bad JSON"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class CompositionError(DblFibError):
    """Composite requested for a non-composable pair"""


class NotAFibration(DblFibError):
    """No Cartesian lift exists for a (base arrow, object) pair"""

    def __init__(self, pair: Tuple[Any, Any], message: Optional[str] = None):
        self.pair = pair
        super().__init__(message or f"no Cartesian lift for base arrow {pair[0]!r} at {pair[1]!r}")


class PreconditionError(DblFibError):
    """An operation was called outside its precondition"""


class FlavorError(DblFibError):
    """Double functor flavor does not match what was claimed or required"""


class WindowClosureError(DblFibError):
    """A provider window cannot close a requested composite"""


class ConfigurationError(DblFibError):
    """Invalid environment configuration"""
