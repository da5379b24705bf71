"""Level-wise fuzzy arithmetic under four interaction semantics.

Write each alpha-cut parametrically, a(t, alpha) = lower + t * width.  An
operation then depends on how the traversal parameters of its operands are
tied together:

``standard``
    Each operand sweeps its own parameter; the result cut is the full
    level-wise interval combination.  This is the classical extension.
``parametric``
    Same as standard, spelled in the two-parameter form c(t1, t2, alpha).
    It coincides with standard for every pair of operands.
``cia``
    One parameter per *distinct* operand.  The only observable difference
    from parametric is a self-operation like A - A or A / A, where both
    sides share a single sweep, so A - A collapses to crisp 0 and A / A to
    crisp 1.  Operands count as identical only when they are the same
    object.
``slcia``
    A single shared parameter for all operands, even distinct ones.  Sums
    and differences are affine in the shared t, so endpoints suffice; for
    products the value is quadratic in t and for quotients the t-derivative
    has constant sign, so the one interior stationary point of the product
    is examined in closed form.

Division requires the divisor's support to exclude zero.  Every operation
evaluates on a shared level grid and returns a sampled number.  Under
slcia the per-level intervals of two distinct operands need not nest; when
they do not, no fuzzy number represents the result and InvalidLevelSet is
raised (the difference variants p_difference and gp_difference exist for
exactly that situation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlphaGrid, DEFAULT_GRID, FuzzyNumber
from .errors import (DivisionBySpanningZero, InvalidLevelSet,
                     MonotonicityViolation, SpecError)

__all__ = [
    "SEMANTICS",
    "arith",
    "scalar_mul",
    "DifferenceReport",
    "p_difference",
    "gp_difference",
    "distance",
]

SEMANTICS = ("standard", "parametric", "cia", "slcia")
_OPS = ("+", "-", "*", "/")

#: Sign tolerance for the finite-difference existence test of p_difference.
P_DIFF_TOL = 1e-9


def _check_divisor(b: FuzzyNumber):
    sup = b.support()
    if sup.lo <= 0.0 <= sup.hi:
        raise DivisionBySpanningZero(
            f"divisor support [{sup.lo:g}, {sup.hi:g}] contains zero")


def _corner_combine(alo, ahi, blo, bhi, op):
    """Level-wise interval combination from the four endpoint pairings.

    Exact for these operations: each is monotone in every argument once the
    divisor sign is fixed, so the extremes sit at endpoint combinations.
    """
    if op == "+":
        return alo + blo, ahi + bhi
    if op == "-":
        return alo - bhi, ahi - blo
    pairs = [(alo, blo), (alo, bhi), (ahi, blo), (ahi, bhi)]
    if op == "*":
        vals = np.stack([x * y for x, y in pairs])
    elif op == "/":
        vals = np.stack([x / y for x, y in pairs])
    else:
        raise SpecError(f"unknown operation {op!r}")
    return vals.min(axis=0), vals.max(axis=0)


def _shared_sweep(alo, ahi, blo, bhi, op):
    """Extremes of a(t) op b(t) over the single shared parameter t in [0, 1]."""
    wa = ahi - alo
    wb = bhi - blo
    if op == "+":
        v0, v1 = alo + blo, ahi + bhi
        lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
    elif op == "-":
        v0, v1 = alo - blo, ahi - bhi
        lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
    elif op == "*":
        # Quadratic in t: value = q2 t^2 + q1 t + q0.
        v0, v1 = alo * blo, ahi * bhi
        lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
        q2 = wa * wb
        q1 = alo * wb + blo * wa
        with np.errstate(divide="ignore", invalid="ignore"):
            tstar = -q1 / (2.0 * q2)
        inner = np.isfinite(tstar) & (tstar > 0.0) & (tstar < 1.0)
        if np.any(inner):
            ts = np.where(inner, tstar, 0.5)
            a_at = alo + ts * wa
            b_at = blo + ts * wb
            vstar = a_at * b_at
            lo = np.where(inner, np.minimum(lo, vstar), lo)
            hi = np.where(inner, np.maximum(hi, vstar), hi)
    elif op == "/":
        # d/dt [a(t)/b(t)] has the constant-sign numerator wa*b(0) - wb*a(0),
        # so the quotient is monotone in t and endpoints are enough.
        v0, v1 = alo / blo, ahi / bhi
        lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
    else:
        raise SpecError(f"unknown operation {op!r}")
    return lo, hi


def arith(a: FuzzyNumber, b: FuzzyNumber, op: str, sem: str = "standard",
          grid: AlphaGrid | None = None) -> FuzzyNumber:
    """Combine two fuzzy numbers level-wise under the given semantics."""
    if op not in _OPS:
        raise SpecError(f"operation must be one of {_OPS}, got {op!r}")
    if sem not in SEMANTICS:
        raise SpecError(f"semantics must be one of {SEMANTICS}, got {sem!r}")
    g = DEFAULT_GRID if grid is None else grid
    if op == "/":
        _check_divisor(b)
    alo, ahi = a.cuts(g)
    blo, bhi = b.cuts(g)
    shared = sem == "slcia" or (sem == "cia" and a is b)
    if shared:
        lo, hi = _shared_sweep(alo, ahi, blo, bhi, op)
        try:
            return FuzzyNumber.from_samples(g, lo, hi)
        except MonotonicityViolation as exc:
            raise InvalidLevelSet(
                f"the shared-parameter {op} family does not stack into a "
                f"fuzzy number ({exc}); for differences, p_difference and "
                "gp_difference handle this case") from exc
    lo, hi = _corner_combine(alo, ahi, blo, bhi, op)
    return FuzzyNumber.from_samples(g, lo, hi)


def scalar_mul(k: float, a: FuzzyNumber) -> FuzzyNumber:
    """Scale by a crisp number; exact shapes stay exact."""
    k = float(k)
    if a.kind == "triangular":
        p, q, r = a.params
        vals = (k * p, k * q, k * r)
        return FuzzyNumber.triangular(*(vals if k >= 0 else vals[::-1]))
    if a.kind == "trapezoidal":
        p, q, r, s = a.params
        vals = (k * p, k * q, k * r, k * s)
        return FuzzyNumber.trapezoidal(*(vals if k >= 0 else vals[::-1]))
    lo, hi = a.cuts(a.grid)
    if k >= 0:
        return FuzzyNumber.from_samples(a.grid, k * lo, k * hi)
    return FuzzyNumber.from_samples(a.grid, k * hi, k * lo)


@dataclass(frozen=True)
class DifferenceReport:
    """Outcome of a parametric difference.

    ``condition_used`` records the orientation in which the shared-sweep
    difference stacks into a fuzzy number: "nondecreasing", "nonincreasing",
    "both" (the difference is crisp), or "neither" (no parametric
    difference; ``result`` is None and ``exists`` is False).
    """

    result: FuzzyNumber | None
    exists: bool
    condition_used: str


def _p_difference_arrays(a: FuzzyNumber, b: FuzzyNumber, g: AlphaGrid,
                         tol: float) -> tuple[np.ndarray, np.ndarray, str]:
    """Shared-sweep difference endpoints and the orientation label."""
    alo, ahi = a.cuts(g)
    blo, bhi = b.cuts(g)
    c0 = alo - blo          # sweep value at t = 0
    c1 = ahi - bhi          # sweep value at t = 1
    # The difference is affine in the shared t, so it stacks into a fuzzy
    # number iff, in one orientation, c0 is a valid lower endpoint family and
    # c1 a valid upper one (or the reverse).  Signs are tested by forward
    # differences on the grid.
    nondecr = (np.all(np.diff(c0) >= -tol)
               and np.all(np.diff(c1) <= tol)
               and c1[-1] - c0[-1] >= -tol)
    nonincr = (np.all(np.diff(c0) <= tol)
               and np.all(np.diff(c1) >= -tol)
               and c1[-1] - c0[-1] <= tol)
    if nondecr and nonincr:
        label = "both"
    elif nondecr:
        label = "nondecreasing"
    elif nonincr:
        label = "nonincreasing"
    else:
        label = "neither"
    return c0, c1, label


def p_difference(a: FuzzyNumber, b: FuzzyNumber, grid: AlphaGrid | None = None,
                 tol: float = P_DIFF_TOL) -> DifferenceReport:
    """Parametric difference: both operands swept by one shared parameter.

    The candidate cut at each level is [min, max] of the two sweep endpoints
    a(t, alpha) - b(t, alpha) at t = 0 and t = 1.  It is a fuzzy number only
    when the sweep family stacks; otherwise the difference does not exist
    and the report says so.  When both orientations stack the result is
    crisp.
    """
    g = DEFAULT_GRID if grid is None else grid
    c0, c1, label = _p_difference_arrays(a, b, g, tol)
    if label == "neither":
        return DifferenceReport(None, False, label)
    lo = np.minimum(c0, c1)
    hi = np.maximum(c0, c1)
    # Existence was established with sign tolerance `tol`, which is looser
    # than the 1e-12 construction tolerance; flatten that much residual
    # noise so the validated constructor accepts the envelope.
    lo = np.maximum.accumulate(lo)
    hi = np.minimum.accumulate(hi)
    mid = 0.5 * (lo[-1] + hi[-1])
    lo = np.minimum(lo, mid)
    hi = np.maximum(hi, mid)
    result = FuzzyNumber.from_samples(g, lo, hi)
    return DifferenceReport(result, True, label)


def gp_difference(a: FuzzyNumber, b: FuzzyNumber,
                  grid: AlphaGrid | None = None) -> FuzzyNumber:
    """Generalized parametric difference; always exists.

    At level alpha it takes the running envelope, over all levels beta >=
    alpha, of the shared-sweep difference extremes.  Because the sweep is
    affine in t the per-level extremes sit at t = 0 and t = 1, and the
    envelope is a single reversed cumulative min/max over the grid.  The
    construction stacks by design, so the result always validates.
    """
    g = DEFAULT_GRID if grid is None else grid
    alo, ahi = a.cuts(g)
    blo, bhi = b.cuts(g)
    c0 = alo - blo
    c1 = ahi - bhi
    m = np.minimum(c0, c1)
    big = np.maximum(c0, c1)
    lo = np.minimum.accumulate(m[::-1])[::-1]
    hi = np.maximum.accumulate(big[::-1])[::-1]
    return FuzzyNumber.from_samples(g, lo, hi)


def distance(a: FuzzyNumber, b: FuzzyNumber, grid: AlphaGrid | None = None) -> float:
    """Sup metric over levels and traversal parameters.

    For each level the worst parametric deviation |a(t) - b(t)| of the
    affine sweeps is attained at t = 0 or t = 1, so the metric reduces to
    the larger of the endpoint deviations, maximized over the grid.
    """
    g = DEFAULT_GRID if grid is None else grid
    alo, ahi = a.cuts(g)
    blo, bhi = b.cuts(g)
    return float(np.max(np.maximum(np.abs(alo - blo), np.abs(ahi - bhi))))
