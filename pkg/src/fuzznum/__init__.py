"""Fuzzy numbers on level sets: arithmetic, calculus, initial-value problems.

The package is organized around a parametric view of level sets: every cut
is traversed by parameters in [0, 1], and every operation is defined by how
those parameters are shared or swept.

``core``
    FuzzyNumber, AlphaGrid, construction and validation, the extension of
    crisp functions to fuzzy arguments.
``arith``
    Level-wise arithmetic under four sweep semantics, the parametric and
    generalized parametric differences, the sup metric.
``calculus``
    Fuzzy-valued functions, parametric and generalized derivatives,
    switching points, level-wise integration, the fundamental identity.
``fde``
    Initial-value problems with fuzzy data: the sweep-family solver and the
    coupled endpoint solver.
``expr``
    The small expression language used by the CLI and the solvers.
"""

from .core import (AlphaGrid, DEFAULT_GRID, FuzzyNumber, FuzzyVector,
                   LevelInterval, fuzzy_to_json, make_fuzzy, zadeh_extend)
from .arith import (SEMANTICS, DifferenceReport, arith, distance,
                    gp_difference, p_difference, scalar_mul)
from .calculus import (ClassifiedRegion, DerivativeReport, FuzzyFunction,
                       NewtonLeibnizReport, SwitchingPoint, classify_at,
                       classification_profile, derivative_family,
                       find_switching_points, gp_derivative, integrate,
                       newton_leibniz_check, p_derivative)
from .expr import BoundExpr, bind, parse, to_string
from .fde import (FdeProblem, FuzzySolution, crisp_reference_solve,
                  estimate_lipschitz, solve, solve_coupled, solve_parametric)
from .quadrature import adaptive_simpson
from .errors import (CrossingViolation, DivisionBySpanningZero, DomainError,
                     FuzznumError, IntegrationBlowup, InputError,
                     InvalidLevelSet, MonotonicityViolation, NonFiniteValue,
                     NotPDifferentiable, NoValidBranch, ParseError,
                     QuadratureFailure, SpecError)

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid", "DEFAULT_GRID", "FuzzyNumber", "FuzzyVector", "LevelInterval",
    "fuzzy_to_json", "make_fuzzy", "zadeh_extend",
    "SEMANTICS", "DifferenceReport", "arith", "distance", "gp_difference",
    "p_difference", "scalar_mul",
    "ClassifiedRegion", "DerivativeReport", "FuzzyFunction",
    "NewtonLeibnizReport", "SwitchingPoint", "classify_at",
    "classification_profile", "derivative_family", "find_switching_points",
    "gp_derivative", "integrate", "newton_leibniz_check", "p_derivative",
    "BoundExpr", "bind", "parse", "to_string",
    "FdeProblem", "FuzzySolution", "crisp_reference_solve",
    "estimate_lipschitz", "solve", "solve_coupled", "solve_parametric",
    "adaptive_simpson",
    "FuzznumError", "InputError", "ParseError", "MonotonicityViolation",
    "CrossingViolation", "DomainError", "DivisionBySpanningZero", "SpecError",
    "NonFiniteValue", "NotPDifferentiable", "QuadratureFailure",
    "IntegrationBlowup", "NoValidBranch", "InvalidLevelSet",
    "__version__",
]
