"""
Error Hierarchy
===============

Every failure raised by the library derives from FibochainError so the CLI can
map it to an exit status in one place.
"""

from typing import Optional


class FibochainError(Exception):
    """Base class for all library errors."""


class ParseError(FibochainError, ValueError):
    """Malformed rule, window, exact number, patch or seed text."""


class RangeError(FibochainError, OverflowError):
    """An exact value is too large to convert to a double."""


class UnsupportedRuleError(FibochainError):
    """Rule is not a primitive two-letter rule with quadratic eigenvalues."""


class NotPisotError(FibochainError):
    """The conjugate of the inflation factor does not contract."""


class IllegalSeedError(FibochainError):
    """Seed word is empty or contains an illegal marker pair."""


class CycleError(FibochainError):
    """Seed is not eventually periodic under the rule within the bound."""


class WindowError(FibochainError):
    """Window or region is empty, unbounded or not a valid partition."""


class UnknownLetterError(FibochainError, KeyError):
    """Letter is not part of the alphabet."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown letter"


class ClosureError(FibochainError):
    """Renormalisation relations reference an index outside the core set."""

    def __init__(self, message: str, z: Optional[object] = None):
        super().__init__(message)
        self.z = z


class DegenerateSystemError(FibochainError):
    """Relation operator does not have a one-dimensional fixed space."""

    def __init__(self, message: str, dimension: int):
        super().__init__(message)
        self.dimension = dimension


class InsufficientDepthError(FibochainError):
    """Approximant does not resolve enough dyadic scales for a fit."""

    def __init__(self, message: str, scales: int):
        super().__init__(message)
        self.scales = scales


class SpectrumError(FibochainError):
    """Invalid spectrum request (threshold, wave number or deformation)."""


class UsageError(FibochainError):
    """Invalid combination of command-line options."""


class IntervalLimitError(WindowError):
    """Approximant would hold more intervals than the configured limit."""

    def __init__(self, message: str, depth: int, intervals: int):
        super().__init__(message)
        self.depth = depth
        self.intervals = intervals
