"""Exception hierarchy shared across the engine modules."""

from __future__ import annotations


class DesignSpaceError(Exception):
    """Base class for all engine errors."""


class PreconditionError(DesignSpaceError):
    """An operation was invoked with arguments that violate its contract."""


class NotFoundError(DesignSpaceError):
    """A referenced space, node, run, or block does not exist."""


class TransportError(DesignSpaceError):
    """A completion call failed before yielding text (timeout, non-2xx, no fixture)."""


class ParseFailure(DesignSpaceError):
    """Model output did not match the expected structure.

    Raised by the output parsers and consumed by the provider retry loop;
    never allowed to escape to callers unwrapped.
    """

    def __init__(self, reason: str, raw: str = ""):
        super().__init__(reason)
        self.reason = reason
        self.raw = raw


class ExhaustionError(DesignSpaceError):
    """All retry attempts for a validated completion call failed."""

    def __init__(self, request_tag: str, attempts: int, last_failure: Exception | None):
        detail = f": {last_failure}" if last_failure is not None else ""
        super().__init__(
            f"{request_tag}: {attempts} attempt(s) exhausted{detail}"
        )
        self.request_tag = request_tag
        self.attempts = attempts
        self.last_failure = last_failure


class IntegrityError(DesignSpaceError):
    """Persisted or submitted state references entities that do not resolve."""
