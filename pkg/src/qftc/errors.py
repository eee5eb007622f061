"""Exception types shared across the package."""


class QftcError(Exception):
    """Base class for all package errors."""


class DomainError(QftcError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class BudgetError(QftcError):
    """A dense simulation would exceed the configured qubit budget."""


class ImpossibleOutcomeError(QftcError, ValueError):
    """Post-selection onto an outcome with (numerically) zero probability."""


class NotProductStateError(QftcError):
    """Product-state backend met a gate it cannot simulate exactly."""
