"""Exception hierarchy shared by all modules."""


class DyadicError(Exception):
    """Base class for all errors raised by this package."""


class InsufficientPrecision(DyadicError):
    """An element is not known to enough digits to decide the question."""


class PrecisionExhausted(DyadicError):
    """A construction failed below the working precision / retry cap."""


class BudgetExhausted(DyadicError):
    """A search exceeded its node budget."""


class DimensionMismatch(DyadicError):
    pass


class LengthMismatch(DyadicError):
    pass


class NotInB(DyadicError):
    """A sequence violates x_i <= x_{i+2} and is not an order-sequence."""


class IndexOutOfRange(DyadicError):
    pass


class NotDefined(DyadicError):
    """A guarded invariant was requested outside its domain of definition."""


class FieldMismatch(DyadicError):
    pass


class SpaceMismatch(DyadicError):
    pass


class InputError(DyadicError):
    """Malformed literal or input file."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
