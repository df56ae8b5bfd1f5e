"""Exception types shared across the package."""


class HamLabError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HamLabError):
    """An argument violates a documented precondition."""


class GenerationFailedError(HamLabError):
    """A randomized graph construction exhausted its retry budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class ParseError(HamLabError):
    """A persisted file is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class NoHittingTimeError(HamLabError):
    """The requested hitting time does not exist for this host."""


class FinderFailureError(HamLabError):
    """The cycle finder failed where success was required."""


class OracleUnavailableError(HamLabError):
    """Exact decision requested beyond the configured size limit."""


class InvalidRotationError(HamLabError):
    """Rotation pivot out of range or chord missing."""


class InvalidStateError(HamLabError):
    """Operation called on a graph that violates its preconditions."""
