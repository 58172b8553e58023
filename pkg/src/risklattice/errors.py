"""Exception hierarchy.

Everything derives from ``RiskLatticeError`` so callers can catch broadly;
the concrete classes also subclass ``ValueError`` where the failure is a bad
argument, so idiomatic ``except ValueError`` keeps working.
"""


class RiskLatticeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(RiskLatticeError, ValueError):
    """Two samples that must live on the same atom space have different lengths."""


class DomainError(RiskLatticeError, ValueError):
    """A parameter or input is outside the operation's domain."""


class NumericError(RiskLatticeError, ArithmeticError):
    """A numerical routine failed to converge or detected an inconsistent bracket."""


class CounterexampleSearchError(RiskLatticeError, RuntimeError):
    """A constructive counterexample search found no admissible witness."""


class DataError(RiskLatticeError, ValueError):
    """Malformed or empty input data (CSV ingestion, config files)."""
