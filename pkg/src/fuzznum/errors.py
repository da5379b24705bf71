"""Exception hierarchy.

Two families matter to callers: ``InputError`` covers everything wrong with
what the user handed us (malformed expressions, invalid level sets, operands
that make an operation undefined), while ``ComputationError`` covers failures
that arise while computing (blow-ups, quadrature that will not converge,
results that stop being valid fuzzy numbers).  The command line maps the
first family to exit code 2 and the second to exit code 3.
"""

from __future__ import annotations


class FuzznumError(Exception):
    """Base class for every error raised by this package."""


class InputError(FuzznumError):
    """The caller supplied data that violates a precondition."""


class ParseError(InputError):
    """Expression text could not be parsed.

    Carries the byte offset of the failure and the set of token kinds that
    would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: set[str]):
        super().__init__(f"{message} at offset {offset} (expected: {', '.join(sorted(expected))})")
        self.offset = offset
        self.expected = frozenset(expected)


class MonotonicityViolation(InputError):
    """Level-set endpoints are not monotone across alpha levels."""


class CrossingViolation(InputError):
    """A lower endpoint exceeds the matching upper endpoint."""


class InvalidLevelSet(FuzznumError):
    """Computed level sets failed the nesting check."""


class DomainError(InputError):
    """Evaluation was requested outside a function's domain."""


class DivisionBySpanningZero(InputError):
    """Division where the divisor's support contains zero."""


class NonFiniteValue(FuzznumError):
    """An evaluation produced NaN or an infinity."""


class NotPDifferentiable(FuzznumError):
    """A parametric derivative does not exist at the requested point."""


class QuadratureFailure(FuzznumError):
    """Adaptive quadrature could not reach the requested tolerance."""


class IntegrationBlowup(FuzznumError):
    """An ODE trajectory left the finite range."""


class NoValidBranch(FuzznumError):
    """Neither lateral branch yields a valid fuzzy solution."""


class SpecError(InputError):
    """A JSON problem or function spec is malformed."""


#: Errors that indicate a numerical failure rather than bad input.
COMPUTATION_ERRORS = (
    NonFiniteValue,
    NotPDifferentiable,
    QuadratureFailure,
    IntegrationBlowup,
    NoValidBranch,
    InvalidLevelSet,
)
