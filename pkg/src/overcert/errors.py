"""Exception hierarchy shared across the package."""


class OvercertError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(OvercertError, ValueError):
    pass


class ModeMismatch(OvercertError, TypeError):
    """Exact and float scalars were combined."""


class NonFiniteResult(OvercertError, ArithmeticError):
    pass


class NotSquare(OvercertError, ValueError):
    pass


class SingularJacobian(OvercertError, ArithmeticError):
    pass


class PreconditionFailed(OvercertError, ValueError):
    pass


class BudgetExhausted(OvercertError, RuntimeError):
    pass


class RankDeficientMatrix(OvercertError, ValueError):
    pass


class InputNotDistinct(OvercertError, ValueError):
    pass


class ZeroPolynomial(OvercertError, ValueError):
    pass


class EmptyInput(OvercertError, ValueError):
    pass


class DimensionTooHigh(OvercertError, ValueError):
    pass


class RankDeficient(OvercertError, ValueError):
    """A lattice has infinite index (rank below the ambient dimension)."""


class NonIntegerResult(OvercertError, ArithmeticError):
    pass


class DegenerateData(OvercertError, RuntimeError):
    pass


class SchemaError(OvercertError, ValueError):
    pass


class NonFiniteFloat(SchemaError):
    pass
