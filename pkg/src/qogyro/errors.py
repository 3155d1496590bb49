"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to so the front end never has
to guess.
"""


class QogError(Exception):
    exit_code = 1


class DomainError(QogError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""

    exit_code = 2


class RegimeError(QogError):
    """The requested quantity needs bound states that do not exist."""

    exit_code = 3


class NumericalConsistencyError(QogError, ArithmeticError):
    """A numerically-real quantity came out complex or non-positive."""

    exit_code = 4


class SolverDiagnosticError(NumericalConsistencyError):
    """The Volterra stepper produced |u| > 1 + 1e-3; the step is too large."""
