"""Quadratic lattices over dyadic local fields.

Invariant computation (orders, alpha invariants, Jordan data), exact
decision procedures for representation N -> M and isometry of integral
quadratic lattices over supported dyadic fields, and an independent
brute-force embedding oracle for differential validation.
"""

from .errors import (
    BudgetExhausted,
    DimensionMismatch,
    DyadicError,
    FieldMismatch,
    IndexOutOfRange,
    InputError,
    InsufficientPrecision,
    LengthMismatch,
    NotDefined,
    NotInB,
    PrecisionExhausted,
    SpaceMismatch,
)
from .fields import (
    INF,
    FieldDesc,
    FieldElem,
    Q2,
    SquareClass,
    delta_unit,
    hilbert,
    in_norm_group,
    quad_defect,
    square_class,
    valuation,
)

__all__ = [
    "INF",
    "FieldDesc",
    "FieldElem",
    "Q2",
    "SquareClass",
    "delta_unit",
    "hilbert",
    "in_norm_group",
    "quad_defect",
    "square_class",
    "valuation",
    "DyadicError",
    "InsufficientPrecision",
    "PrecisionExhausted",
    "BudgetExhausted",
    "DimensionMismatch",
    "LengthMismatch",
    "NotInB",
    "IndexOutOfRange",
    "NotDefined",
    "FieldMismatch",
    "SpaceMismatch",
    "InputError",
]
