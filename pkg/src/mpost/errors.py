"""Shared exception and warning types."""

__all__ = ["ConfigError", "NumericalError", "NumericalWarning"]


class ConfigError(ValueError):
    """Invalid or inconsistent user-facing configuration."""


class NumericalError(RuntimeError):
    """A numerical routine failed beyond recovery (non-finite results,
    unsalvageable conditioning)."""


class NumericalWarning(RuntimeWarning):
    """A numerical routine recovered by regularizing (e.g. jitter added
    to an ill-conditioned solve)."""
