"""Exception types shared across the package."""


class UmwError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(UmwError):
    """Malformed graph or clause file content."""


class ValidationError(UmwError):
    """Structurally well-formed input that violates a model invariant."""


class LimitExceeded(UmwError):
    """Instance too large for an exact enumeration routine."""


class RateInfeasible(UmwError):
    """Requested arrival rate at or above the broadcast capacity."""


class DimensionMismatch(UmwError):
    """Vector arguments of inconsistent length."""


class ZeroNorm(UmwError):
    """Operation undefined on an all-zero queue vector."""


class ConfigError(UmwError):
    """Invalid simulation or experiment configuration."""
