"""Exception types shared by every module."""

from __future__ import annotations


class NlgfError(Exception):
    """Base class."""


class ParameterError(NlgfError, ValueError):
    """Bad or inconsistent arguments."""


class DomainError(NlgfError, ValueError):
    """Input outside the domain of an operation (inv(0), seed outside V, ...)."""


class CapacityError(NlgfError, RuntimeError):
    """An enumeration or search would exceed the configured cap."""


class InvariantError(NlgfError, AssertionError):
    """An internal invariant failed to hold."""


__all__ = ["NlgfError", "ParameterError", "DomainError", "CapacityError", "InvariantError"]
