"""Exception hierarchy.  Each class maps to one CLI exit code."""

from __future__ import annotations


class FoliationLabError(Exception):
    exit_code = 2


class InputError(FoliationLabError, ValueError):
    """Malformed or mathematically invalid input (exit code 2)."""

    exit_code = 2


class ParseError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DescentError(InputError):
    """The form does not descend: rad ⌐ w != 0 or wrong homogeneity weight."""


class HomogeneityError(InputError):
    """Coefficients are not homogeneous of one common degree."""


class IntegrabilityError(InputError):
    """w ∧ dw != 0."""


class NotZeroDimensional(FoliationLabError):
    """An ideal expected to cut out finitely many points does not."""

    exit_code = 2


class GenericityError(FoliationLabError):
    """Random plane choices kept disagreeing or stayed degenerate (exit code 3)."""

    exit_code = 3


class BudgetExceeded(FoliationLabError):
    """A configured resource budget ran out; never a wrong answer (exit code 4)."""

    exit_code = 4
