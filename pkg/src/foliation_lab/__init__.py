"""Singularity invariants of codimension-one foliations, computed exactly."""

from .errors import (BudgetExceeded, DescentError, FoliationLabError, GenericityError,
                     HomogeneityError, InputError, IntegrabilityError, NotZeroDimensional,
                     ParseError)
from .poly import GF, GREVLEX, LEX, QQ, Field, PolyRing, Polynomial, TermOrder, parse_poly

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "DescentError", "FoliationLabError", "GenericityError", "HomogeneityError",
    "InputError", "IntegrabilityError", "NotZeroDimensional", "ParseError",
    "GF", "GREVLEX", "LEX", "QQ", "Field", "PolyRing", "Polynomial", "TermOrder", "parse_poly",
]
