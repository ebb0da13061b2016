"""Semantic exception types shared across the package."""


class CewocError(Exception):
    """Base class for all package errors."""


class DomainError(CewocError, ValueError):
    """An input value lies outside the mathematical domain of an operation."""


class ConfigError(CewocError, ValueError):
    """A configuration object violates its invariants."""


class StateError(CewocError, RuntimeError):
    """An operation was invoked in a state that cannot serve it."""
