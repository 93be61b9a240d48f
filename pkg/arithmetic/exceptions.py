"""Domain exceptions shared by the arithmetic, certificates and spectrum apps."""


class FieldMismatchError(ValueError):
    """Operands live in different quadratic fields, or a string names the wrong field."""


class NotSquareFreeError(ValueError):
    """D is not a square-free integer >= 2."""


class NonIntegralError(ValueError):
    """An algebraic integer was required."""


class NonExactDivisionError(ArithmeticError):
    """A division that must be exact left a remainder."""


class UndecidableComparisonError(ArithmeticError):
    """Interval evaluation could not separate two quantities below the precision cap."""


class PrecisionCapExceededError(ArithmeticError):
    """Adjacent spectrum levels could not be separated below the precision cap."""


class ConstructionError(ValueError):
    """Inputs violate a precondition of a certificate construction."""


class IdentityCheckError(ArithmeticError):
    """An exact identity a construction relies on did not hold."""
