"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ValidationError`` for bad inputs, ``NumericalError`` for solver failures.
"""


class HmmNmfError(Exception):
    """Base class for all package errors."""


class ValidationError(HmmNmfError, ValueError):
    pass


class NumericalError(HmmNmfError, ArithmeticError):
    pass


class NegativeEntry(ValidationError):
    pass


class RowSumViolation(ValidationError):
    pass


class BadInitial(ValidationError):
    pass


class SymbolOutOfRange(ValidationError):
    pass


class ZeroProbabilityPrefix(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class SequenceTooShort(ValidationError):
    pass


class EmptyStats(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class DimensionMismatch(ShapeMismatch):
    pass


class BadShape(ShapeMismatch):
    pass


class AlphabetMismatch(ValidationError):
    pass


class OrderTooLarge(ValidationError):
    pass


class NonErgodic(NumericalError):
    pass


class NonFiniteDivergence(NumericalError):
    pass


class LpInfeasible(NumericalError):
    pass


class LpNotConverged(NumericalError):
    pass
