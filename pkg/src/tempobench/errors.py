"""Exception types shared across the package."""


class TempobenchError(Exception):
    """Base class for package errors."""


class SupportError(TempobenchError, ValueError):
    """Data or argument falls outside a distribution family's support."""


class DegenerateDataError(TempobenchError, ValueError):
    """Sample has zero variance; three of the four families become improper."""


class ConfigError(TempobenchError, ValueError):
    """Malformed simulation, scheduling or service configuration."""


class UnboundedOptimumError(TempobenchError, ValueError):
    """Dispatch objective has no finite minimizer (robot should wait forever)."""
