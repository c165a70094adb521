"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the contract of an operation (bad range, mismatched
    dimensions, invalid particle numbers, ...)."""


class CapacityError(RuntimeError):
    """Requested problem size exceeds the configured dense-matrix guard."""


class NumericError(RuntimeError):
    """A numerical invariant failed (non-convergence, broken normalization)."""


class ConfigError(ValueError):
    """Malformed scenario configuration; message carries the field path."""
