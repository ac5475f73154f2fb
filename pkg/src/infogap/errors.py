"""Exception hierarchy shared by every module in the package.

All errors raised on purpose derive from :class:`InfogapError`, so callers
can catch one type at the CLI boundary and map it to an exit code.
"""

from __future__ import annotations


class InfogapError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(InfogapError):
    """An input object violates one of its declared invariants."""


class ZeroMarginal(InfogapError):
    """A joint table carries positive mass on a cell whose marginal is zero.

    This cannot happen for a table built by the constructors in this
    package; it signals a corrupt hand-built table.
    """


class AlphabetMismatch(InfogapError):
    """A channel's row count does not match the signal alphabet size."""


class RateOutOfRange(InfogapError):
    """A Bernoulli success rate lies outside [0, 1]."""


class DegenerateChannel(InfogapError):
    """Parameters collapse the quantity of interest identically to zero."""


class DomainError(InfogapError):
    """A scalar argument lies outside the function's domain."""


class BudgetTooSmall(InfogapError):
    """The error estimate exceeds the caller-supplied cap."""


class HardCapExceeded(InfogapError):
    """A truncated series would need more terms than the policy allows."""
