"""Fuzzy-valued functions of a real variable: derivatives and integrals.

A fuzzy-valued function F carries, for every x, a fuzzy number F(x).  Two
representations are supported and deliberately kept apart, because their
derivatives and integrals differ in general:

``endpoint`` mode
    F(x) is described by its endpoint functions lower(x, alpha) and
    upper(x, alpha); the cut is traversed by one parameter t.

``coefficient`` mode
    F(x) is built from fuzzy coefficients attached to crisp kernels, either
    as an explicit linear combination sum_j C_j * g_j(x) or through a parsed
    expression with named fuzzy constants.  Each distinct coefficient keeps
    its own traversal parameter, so the sweep runs over a corner family.

The parametric derivative at x collects the x-derivatives of the sweep
family.  Its per-level envelope [min, max] over the family corners is the
candidate cut.  For endpoint mode, existence and lateral form follow the
three-sign criterion: with c0 = (lower)' and c1 = (upper)' as functions of
alpha, the family stacks in nondecreasing orientation iff c0 is nondecreasing,
c1 is nonincreasing and c1 - c0 >= 0 at alpha = 1 (the i-form, cut
[(lower)', (upper)']); with all three signs reversed it stacks the other way
(the d-form, cut [(upper)', (lower)']); if neither block holds the function
has no parametric derivative there.  Coefficient mode generalizes the blocks
over its corner family, orienting each sweep slot first so that its zero
corner sits on the lower endpoint (a slot whose kernel factor is negative at
x traverses the cut backwards, and the blocks are written for the forward
orientation); when neither lateral block applies, it falls back to checking
the stacking of the envelope itself.

A switching point is an x where the lateral form flips from one side to the
other; points where both blocks fail on one side are classification gaps,
not switches.  The generalized derivative replaces the per-level envelope by
its running envelope over all levels beta >= alpha, which always stacks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import AlphaGrid, DEFAULT_GRID, FuzzyNumber, make_fuzzy
from .errors import DomainError, NonFiniteValue, NotPDifferentiable, SpecError
from .expr import BoundExpr, bind, is_affine_in_slot
from .quadrature import adaptive_simpson
from .arith import arith as combine, distance as sup_distance, p_difference

__all__ = [
    "FuzzyFunction",
    "DerivativeReport",
    "SwitchingPoint",
    "ClassifiedRegion",
    "p_derivative",
    "gp_derivative",
    "derivative_family",
    "classify_at",
    "classification_profile",
    "find_switching_points",
    "integrate",
    "NewtonLeibnizReport",
    "newton_leibniz_check",
]

#: Default step for numerical x-derivatives.
DERIV_STEP = 1e-6
#: Sign tolerance for the lateral condition blocks.
BLOCK_TOL = 1e-8
#: Relative threshold separating float noise from a genuine kink when the
#: forward and backward difference quotients are compared.
KINK_TOL = 1e-3


def _grid_or_default(grid: AlphaGrid | None) -> AlphaGrid:
    return DEFAULT_GRID if grid is None else grid


class FuzzyFunction:
    """A fuzzy-valued function on a closed interval."""

    def __init__(self):
        raise SpecError("use one of the from_* constructors")

    @classmethod
    def _blank(cls) -> "FuzzyFunction":
        self = object.__new__(cls)
        self.mode = ""
        self.domain = (0.0, 1.0)
        self._lower = None
        self._upper = None
        self._dlower = None
        self._dupper = None
        self._terms = None
        self._bound = None
        self._dbound = None
        self._slot_values = None
        self._corner_matrix = None
        self._e_indices = None
        self._cut_cache = {}
        return self

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_endpoints(cls, lower: Callable, upper: Callable,
                       domain: tuple[float, float],
                       d_lower: Callable | None = None,
                       d_upper: Callable | None = None) -> "FuzzyFunction":
        """Endpoint mode from callables (x, alphas) -> array over alphas.

        Optional analytic x-derivatives take the same signature; without
        them, central differences with step 1e-6 are used.
        """
        self = cls._blank()
        self.mode = "endpoint"
        self.domain = (float(domain[0]), float(domain[1]))
        self._lower = lower
        self._upper = upper
        self._dlower = d_lower
        self._dupper = d_upper
        return self

    @classmethod
    def from_product(cls, coeff: FuzzyNumber, kernel: Callable,
                     domain: tuple[float, float],
                     d_kernel: Callable | None = None,
                     mode: str = "endpoint") -> "FuzzyFunction":
        """The function coeff * kernel(x) in either representation.

        In endpoint mode the cut endpoints swap roles wherever the kernel is
        negative; in coefficient mode the single coefficient keeps one sweep
        parameter throughout.
        """
        coeff = make_fuzzy(coeff)
        if mode == "coefficient":
            return cls.from_terms([(coeff, kernel, d_kernel)], domain)
        if mode != "endpoint":
            raise SpecError(f"unknown mode {mode!r}")

        def lower(x, alphas):
            g = float(kernel(x))
            return np.where(g >= 0.0, coeff.lower(alphas) * g, coeff.upper(alphas) * g)

        def upper(x, alphas):
            g = float(kernel(x))
            return np.where(g >= 0.0, coeff.upper(alphas) * g, coeff.lower(alphas) * g)

        d_lower = d_upper = None
        if d_kernel is not None:
            def d_lower(x, alphas):
                g = float(kernel(x))
                dg = float(d_kernel(x))
                return np.where(g >= 0.0, coeff.lower(alphas) * dg, coeff.upper(alphas) * dg)

            def d_upper(x, alphas):
                g = float(kernel(x))
                dg = float(d_kernel(x))
                return np.where(g >= 0.0, coeff.upper(alphas) * dg, coeff.lower(alphas) * dg)

        return cls.from_endpoints(lower, upper, domain, d_lower, d_upper)

    @classmethod
    def from_terms(cls, terms: Sequence, domain: tuple[float, float]) -> "FuzzyFunction":
        """Coefficient mode: sum of (coefficient, kernel[, d_kernel]) terms."""
        self = cls._blank()
        self.mode = "coefficient"
        self.domain = (float(domain[0]), float(domain[1]))
        cooked = []
        for item in terms:
            if len(item) == 2:
                c, g = item
                dg = None
            else:
                c, g, dg = item
            cooked.append((make_fuzzy(c), g, dg))
        if not cooked:
            raise SpecError("at least one term is required")
        self._terms = cooked
        self._slot_values = [np.array([0.0, 1.0])] * len(cooked)
        self._finish_corners()
        return self

    @classmethod
    def from_expression(cls, src, constants, domain: tuple[float, float],
                        t_resolution: int = 9) -> "FuzzyFunction":
        """Coefficient mode from an expression in x with named constants.

        Slots whose sweep enters the expression non-affinely (a constant
        used twice, or inside a nonlinear call) are sampled on a uniform
        parameter grid of the given resolution instead of corners only.
        """
        self = cls._blank()
        self.mode = "coefficient"
        self.domain = (float(domain[0]), float(domain[1]))
        bound = src if isinstance(src, BoundExpr) else bind(src, constants)
        self._bound = bound
        vals = []
        for j in range(bound.arity):
            if is_affine_in_slot(bound, j):
                vals.append(np.array([0.0, 1.0]))
            else:
                vals.append(np.linspace(0.0, 1.0, max(3, t_resolution)))
        self._slot_values = vals
        self._finish_corners()
        return self

    def _finish_corners(self):
        rows = list(itertools.product(*self._slot_values))
        if len(rows) > 4096:
            raise SpecError("parameter sweep family too large")
        self._corner_matrix = np.array(rows) if rows else np.zeros((1, 0))
        k = len(self._slot_values)
        strides = []
        s = 1
        for j in reversed(range(k)):
            strides.append(s)
            s *= len(self._slot_values[j])
        strides = strides[::-1]
        self._e_indices = [(len(self._slot_values[j]) - 1) * strides[j] for j in range(k)]

    # -- sweep family ----------------------------------------------------

    @property
    def arity(self) -> int:
        if self.mode == "endpoint":
            return 1
        return len(self._slot_values)

    def _coeff_cuts(self, grid: AlphaGrid):
        """Cached per-slot endpoint arrays (k, A) on a grid."""
        key = grid
        hit = self._cut_cache.get(key)
        if hit is not None:
            return hit
        if self._terms is not None:
            coeffs = [c for c, _, _ in self._terms]
        else:
            coeffs = list(self._bound.constants)
        lo = np.stack([c.lower(grid.levels) for c in coeffs]) if coeffs else np.zeros((0, len(grid)))
        wd = (np.stack([c.upper(grid.levels) for c in coeffs]) - lo) if coeffs else lo
        # Realized constants per family row: (R, k, A).
        T = self._corner_matrix
        rows = lo[None, :, :] + T[:, :, None] * wd[None, :, :]
        self._cut_cache[key] = rows
        return rows

    def family_values(self, x: float, grid: AlphaGrid) -> np.ndarray:
        """Sweep-family values at x: shape (rows, levels).

        Endpoint mode exposes the two endpoint rows; coefficient mode one
        row per parameter combination.
        """
        alphas = grid.levels
        if self.mode == "endpoint":
            lo = np.asarray(self._lower(x, alphas), dtype=float)
            hi = np.asarray(self._upper(x, alphas), dtype=float)
            return np.stack([lo, hi])
        consts = self._coeff_cuts(grid)
        if self._terms is not None:
            g = np.array([float(gj(x)) for _, gj, _ in self._terms])
            return np.einsum("rka,k->ra", consts, g)
        vals = {name: consts[:, j, :] for j, name in enumerate(self._bound.names)}
        out = self._bound.eval_with_consts(x, None, [vals[n] for n in self._bound.names])
        out = np.asarray(out, dtype=float)
        if out.ndim == 0:
            out = np.full((consts.shape[0], len(grid)), float(out))
        elif out.shape != (consts.shape[0], len(grid)):
            out = np.broadcast_to(out, (consts.shape[0], len(grid))).copy()
        return out

    def _family_dx_analytic(self, x: float, grid: AlphaGrid) -> np.ndarray | None:
        alphas = grid.levels
        if self.mode == "endpoint":
            if self._dlower is None or self._dupper is None:
                return None
            lo = np.asarray(self._dlower(x, alphas), dtype=float)
            hi = np.asarray(self._dupper(x, alphas), dtype=float)
            return np.stack([lo, hi])
        if self._terms is not None:
            if any(dg is None for _, _, dg in self._terms):
                return None
            consts = self._coeff_cuts(grid)
            dg = np.array([float(dgj(x)) for _, _, dgj in self._terms])
            return np.einsum("rka,k->ra", consts, dg)
        if self._dbound is None:
            self._dbound = self._bound.derivative("x")
        consts = self._coeff_cuts(grid)
        try:
            out = self._dbound.eval_with_consts(
                x, None, [consts[:, j, :] for j in range(self._bound.arity)], check=True)
        except NonFiniteValue:
            return None
        out = np.asarray(out, dtype=float)
        if out.ndim == 0:
            out = np.full((consts.shape[0], len(grid)), float(out))
        return out

    # -- evaluation -------------------------------------------------------

    def _check_domain(self, x: float):
        a, b = self.domain
        slack = 1e-9 * max(1.0, abs(b - a))
        if x < a - slack or x > b + slack:
            raise DomainError(f"x={x:g} outside the domain [{a:g}, {b:g}]")

    def value(self, x: float, grid: AlphaGrid | None = None) -> FuzzyNumber:
        """F(x) as a fuzzy number on the given level grid."""
        g = _grid_or_default(grid)
        self._check_domain(x)
        rows = self.family_values(x, g)
        if not np.all(np.isfinite(rows)):
            raise NonFiniteValue(f"function value is not finite at x={x:g}")
        lo = rows.min(axis=0)
        hi = rows.max(axis=0)
        return FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))

    def __call__(self, x: float, grid: AlphaGrid | None = None) -> FuzzyNumber:
        return self.value(x, grid)


def _snap_envelope(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flatten sub-tolerance noise so a mathematically valid envelope stacks."""
    lo = np.maximum.accumulate(lo)
    hi = np.minimum.accumulate(hi)
    mid = 0.5 * (lo[-1] + hi[-1])
    return np.minimum(lo, mid), np.maximum(hi, mid)


# -- derivative families ------------------------------------------------


def derivative_family(F: FuzzyFunction, x: float, grid: AlphaGrid | None = None,
                      h: float = DERIV_STEP) -> np.ndarray:
    """x-derivatives of the sweep family at x, shape (rows, levels).

    Analytic derivatives are used when the function carries them; otherwise
    central differences with step h.  Intended for diagnostics; the
    derivative operators below add kink detection on top.
    """
    g = _grid_or_default(grid)
    rows = F._family_dx_analytic(x, g)
    if rows is not None:
        return rows
    vp = F.family_values(x + h, g)
    vm = F.family_values(x - h, g)
    return (vp - vm) / (2.0 * h)


def _family_dx_probed(F: FuzzyFunction, x: float, g: AlphaGrid, h: float):
    """Derivative rows plus kink diagnostics.

    Returns (rows, kink, fwd, bwd, v0): rows are central differences (or
    analytic, in which case kink is False and fwd/bwd/v0 are None; v0
    otherwise carries the family values at x, reusable for orientation).
    """
    rows = F._family_dx_analytic(x, g)
    if rows is not None:
        return rows, False, None, None, None
    v0 = F.family_values(x, g)
    vp = F.family_values(x + h, g)
    vm = F.family_values(x - h, g)
    fwd = (vp - v0) / h
    bwd = (v0 - vm) / h
    central = (vp - vm) / (2.0 * h)
    scale = max(1.0, float(np.max(np.abs(fwd))), float(np.max(np.abs(bwd))))
    kink = bool(np.max(np.abs(fwd - bwd)) > KINK_TOL * scale)
    return central, kink, fwd, bwd, v0


def _oriented_corners(F: FuzzyFunction, x: float, g: AlphaGrid,
                      v0: np.ndarray | None) -> tuple[int, int, list[int]]:
    """Family-row indices for the lateral blocks, in cut orientation.

    Returns (z, o, ends): z indexes the member that traverses the lower
    endpoint, o the upper one, and ends[j] the far corner of slot j seen
    from z.  A sweep slot whose factor is negative at x covers the cut
    backwards, so its axis is flipped before the blocks are applied.
    """
    if F.mode == "endpoint":
        return 0, 1, [1]
    if v0 is None:
        v0 = F.family_values(x, g)
    E = list(F._e_indices)
    scale = max(1.0, float(np.max(np.abs(v0[:, 0]))))
    flips = [float(v0[e, 0] - v0[0, 0]) < -1e-12 * scale for e in E]
    z = sum(e for e, f in zip(E, flips) if f)
    o = sum(e for e, f in zip(E, flips) if not f)
    ends = [z - e if f else z + e for e, f in zip(E, flips)]
    return z, o, ends


def _block_margins(rows: np.ndarray,
                   corners: tuple[int, int, list[int]]) -> tuple[float, float]:
    """Worst slack of the two lateral condition blocks over the family."""
    z, o, ends = corners
    c0 = rows[z]
    c1 = rows[o]
    d0 = np.diff(c0)
    d1 = np.diff(c1)
    slopes = np.array([rows[e][-1] - c0[-1] for e in ends]) if ends else np.zeros(0)
    parts_a = [d0.min() if d0.size else np.inf,
               (-d1).min() if d1.size else np.inf,
               slopes.min() if slopes.size else np.inf]
    parts_b = [(-d0).min() if d0.size else np.inf,
               d1.min() if d1.size else np.inf,
               (-slopes).min() if slopes.size else np.inf]
    return float(min(parts_a)), float(min(parts_b))


def _label_from_margins(ma: float, mb: float, tol: float) -> str:
    a_ok = ma >= -tol
    b_ok = mb >= -tol
    if a_ok and b_ok:
        return "both"
    if a_ok:
        return "i_p"
    if b_ok:
        return "d_p"
    return "neither"


@dataclass
class DerivativeReport:
    """Result of the parametric derivative at one point.

    ``classification`` is the lateral form: "i_p", "d_p", "both" (the two
    forms agree, crisp-width derivative), or "neither".  For endpoint-mode
    functions "neither" means no parametric derivative exists and ``value``
    is None, except at a symmetric kink where the one-sided derivative sets
    agree and the common envelope is returned.  For coefficient-mode
    functions the envelope can stack even when no lateral block applies; the
    value is then present with classification "neither".
    """

    value: FuzzyNumber | None
    classification: str
    detail: str = ""
    block_margins: tuple[float, float] = (np.nan, np.nan)

    @property
    def exists(self) -> bool:
        return self.value is not None


def classify_at(F: FuzzyFunction, x: float, grid: AlphaGrid | None = None,
                h: float = DERIV_STEP, tol: float = BLOCK_TOL) -> tuple[str, float, float]:
    """Lateral-form label and block margins at x (smooth path only)."""
    g = _grid_or_default(grid)
    rows, _, _, _, v0 = _family_dx_probed(F, x, g, h)
    ma, mb = _block_margins(rows, _oriented_corners(F, x, g, v0))
    return _label_from_margins(ma, mb, tol), ma, mb


def _stacks(lo: np.ndarray, hi: np.ndarray, tol: float) -> bool:
    return (np.all(np.diff(lo) >= -tol)
            and np.all(np.diff(hi) <= tol)
            and lo[-1] <= hi[-1] + tol)


def p_derivative(F: FuzzyFunction, x: float, grid: AlphaGrid | None = None,
                 h: float = DERIV_STEP, tol: float = BLOCK_TOL) -> DerivativeReport:
    """Parametric derivative of F at x.

    The cut, when it exists, is the per-level envelope [min, max] of the
    sweep family's x-derivatives; see the module docstring for the
    existence criterion.  At a kink the one-sided derivative sets are
    compared directly and must agree.
    """
    g = _grid_or_default(grid)
    rows, kink, fwd, bwd, v0 = _family_dx_probed(F, x, g, h)
    if kink:
        lo_f, hi_f = fwd.min(axis=0), fwd.max(axis=0)
        lo_b, hi_b = bwd.min(axis=0), bwd.max(axis=0)
        scale = max(1.0, float(np.max(np.abs(fwd))), float(np.max(np.abs(bwd))))
        gap = max(float(np.max(np.abs(lo_f - lo_b))), float(np.max(np.abs(hi_f - hi_b))))
        if gap > 1e-4 * scale + 10.0 * h * scale:
            return DerivativeReport(
                None, "neither",
                f"one-sided derivative sets differ by {gap:.3g} at the kink")
        lo = 0.5 * (lo_f + lo_b)
        hi = 0.5 * (hi_f + hi_b)
        if not _stacks(lo, hi, max(tol, 1e-6 * scale)):
            return DerivativeReport(None, "neither", "kink envelope does not stack")
        value = FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))
        return DerivativeReport(value, "neither", "symmetric kink; lateral forms do not apply")
    ma, mb = _block_margins(rows, _oriented_corners(F, x, g, v0))
    label = _label_from_margins(ma, mb, tol)
    lo = rows.min(axis=0)
    hi = rows.max(axis=0)
    if label == "neither":
        if F.mode == "endpoint":
            return DerivativeReport(None, label,
                                    "neither lateral condition block holds", (ma, mb))
        if not _stacks(lo, hi, tol):
            return DerivativeReport(None, label,
                                    "sweep-family envelope does not stack", (ma, mb))
        value = FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))
        return DerivativeReport(value, label,
                                "envelope stacks but no lateral form applies", (ma, mb))
    value = FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))
    return DerivativeReport(value, label, "", (ma, mb))


def gp_derivative(F: FuzzyFunction, x: float, grid: AlphaGrid | None = None,
                  h: float = DERIV_STEP) -> FuzzyNumber:
    """Generalized parametric derivative; always yields a fuzzy number.

    At level alpha it is the running envelope, over levels beta >= alpha, of
    the per-level derivative extremes, computed as reversed cumulative
    min/max over the grid.
    """
    g = _grid_or_default(grid)
    rows, kink, fwd, bwd, _ = _family_dx_probed(F, x, g, h)
    if kink:
        lo = 0.5 * (fwd.min(axis=0) + bwd.min(axis=0))
        hi = 0.5 * (fwd.max(axis=0) + bwd.max(axis=0))
    else:
        lo = rows.min(axis=0)
        hi = rows.max(axis=0)
    lo = np.minimum.accumulate(lo[::-1])[::-1]
    hi = np.maximum.accumulate(hi[::-1])[::-1]
    return FuzzyNumber.from_samples(g, lo, hi)


# -- switching points -----------------------------------------------------


@dataclass(frozen=True)
class SwitchingPoint:
    """A lateral-form flip: typeI goes i_p -> d_p, typeII goes d_p -> i_p."""

    x: float
    kind: str


@dataclass(frozen=True)
class ClassifiedRegion:
    x_lo: float
    x_hi: float
    label: str


def _refine_boundary(F, x_left, x_right, left_label, right_label, grid, h, tol,
                     target: float) -> float:
    """Bisect a label change to within ``target`` in x."""
    while x_right - x_left > target:
        xm = 0.5 * (x_left + x_right)
        label, ma, mb = classify_at(F, xm, grid, h, tol)
        if label == left_label:
            x_left = xm
        elif label == right_label:
            x_right = xm
        else:
            # Ambiguous midpoint (a touching "both" or a gap sliver): side
            # with the larger block margin decides.
            prefer_left = (ma >= mb) == (left_label in ("i_p", "both"))
            if left_label == "neither":
                prefer_left = max(ma, mb) < -tol
            if prefer_left:
                x_left = xm
            else:
                x_right = xm
    return 0.5 * (x_left + x_right)


def classification_profile(F: FuzzyFunction, n_scan: int = 2001,
                           grid: AlphaGrid | None = None, h: float = DERIV_STEP,
                           tol: float = BLOCK_TOL,
                           refine_tol: float = 1e-6) -> list[ClassifiedRegion]:
    """Scan the domain and return maximal runs of one lateral-form label.

    Boundaries between runs are refined by bisection to ``refine_tol``.
    Isolated "both" points are absorbed into their neighbors.
    """
    a, b = F.domain
    inset = max(2.0 * h, 1e-12 * (b - a))
    xs = np.linspace(a + inset, b - inset, n_scan)
    labels = [classify_at(F, float(x), grid, h, tol)[0] for x in xs]

    # Strict runs, treating "both" as glue compatible with either side.
    runs: list[tuple[int, int, str]] = []
    i = 0
    n = len(xs)
    while i < n:
        if labels[i] == "both":
            i += 1
            continue
        j = i
        while j + 1 < n and labels[j + 1] in (labels[i], "both"):
            j += 1
        while labels[j] == "both":
            j -= 1
        runs.append((i, j, labels[i]))
        i = j + 1
    if not runs:
        return [ClassifiedRegion(float(xs[0]), float(xs[-1]), "both")]

    bounds = [float(xs[0])]
    for (i1, j1, l1), (i2, j2, l2) in zip(runs, runs[1:]):
        cut = _refine_boundary(F, float(xs[j1]), float(xs[i2]), l1, l2,
                               grid, h, tol, refine_tol)
        bounds.append(cut)
    bounds.append(float(xs[-1]))
    return [ClassifiedRegion(bounds[k], bounds[k + 1], runs[k][2])
            for k in range(len(runs))]


def find_switching_points(F: FuzzyFunction, n_scan: int = 2001,
                          grid: AlphaGrid | None = None, h: float = DERIV_STEP,
                          tol: float = BLOCK_TOL,
                          refine_tol: float = 1e-6) -> list[SwitchingPoint]:
    """All lateral-form flips in the domain interior.

    Transitions into or out of a classification gap are not switches; only
    a direct i_p/d_p adjacency (possibly through an isolated "both" point)
    counts.
    """
    regions = classification_profile(F, n_scan, grid, h, tol, refine_tol)
    out = []
    for r1, r2 in zip(regions, regions[1:]):
        pair = (r1.label, r2.label)
        if pair == ("i_p", "d_p"):
            out.append(SwitchingPoint(r1.x_hi, "typeI"))
        elif pair == ("d_p", "i_p"):
            out.append(SwitchingPoint(r1.x_hi, "typeII"))
    return out


# -- integration ----------------------------------------------------------


def integrate(F: FuzzyFunction, a: float, b: float, grid: AlphaGrid | None = None,
              tol: float = 1e-10) -> FuzzyNumber:
    """Level-wise integral of F over [a, b].

    Endpoint mode integrates the endpoint functions level-wise (reordering
    per level if the quadratures cross); coefficient mode integrates each
    kernel once and takes the envelope of the coefficient sweep against the
    kernel integrals.  The two representations of the same pointwise values
    may legitimately integrate to different fuzzy numbers.
    """
    g = _grid_or_default(grid)
    F._check_domain(a)
    F._check_domain(b)
    if F.mode == "endpoint":
        vals = adaptive_simpson(lambda x: F.family_values(x, g), a, b, tol)
        lo = np.minimum(vals[0], vals[1])
        hi = np.maximum(vals[0], vals[1])
        return FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))
    if F._terms is not None:
        kernel_ints = np.array([adaptive_simpson(lambda x, gj=gj: float(gj(x)), a, b, tol)
                                for _, gj, _ in F._terms])
        clo = np.stack([c.lower(g.levels) for c, _, _ in F._terms])
        chi = np.stack([c.upper(g.levels) for c, _, _ in F._terms])
        v1 = clo * kernel_ints[:, None]
        v2 = chi * kernel_ints[:, None]
        lo = np.minimum(v1, v2).sum(axis=0)
        hi = np.maximum(v1, v2).sum(axis=0)
        return FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))
    rows = adaptive_simpson(lambda x: F.family_values(x, g), a, b, tol)
    lo = rows.min(axis=0)
    hi = rows.max(axis=0)
    return FuzzyNumber.from_samples(g, *_snap_envelope(lo, hi))


# -- fundamental theorem ----------------------------------------------------


@dataclass
class NewtonLeibnizReport:
    """Comparison of the integrated derivative with telescoped differences.

    ``integral`` is the segment-wise integral of the parametric derivative;
    ``telescoped`` is the sum of the parametric differences of consecutive
    segment-end values.  ``crisp_distance`` additionally compares against
    the plain endpoint difference F(b) - F(a) when every segment-end value
    is crisp, and is None otherwise.
    """

    a: float
    b: float
    switches: list[SwitchingPoint]
    integral: FuzzyNumber
    telescoped: FuzzyNumber
    distance: float
    ok: bool
    crisp_distance: float | None = None
    segment_conditions: list[str] = field(default_factory=list)


def newton_leibniz_check(F: FuzzyFunction, a: float, b: float,
                         grid: AlphaGrid | None = None, tol: float = 1e-8,
                         n_scan: int = 2001, quad_tol: float = 1e-10,
                         h: float = DERIV_STEP) -> NewtonLeibnizReport:
    """Verify the fundamental identity for F on [a, b].

    Between consecutive switching points the integral of the parametric
    derivative telescopes through parametric differences of the endpoint
    values; with no switch this is the plain identity over [a, b].
    """
    g = _grid_or_default(grid)
    switches = [s for s in find_switching_points(F, n_scan, grid=g, h=h)
                if a + 1e-9 < s.x < b - 1e-9]
    bounds = [a] + [s.x for s in switches] + [b]

    def d_env(x):
        rows, kink, fwd, bwd, _ = _family_dx_probed(F, x, g, h)
        if kink:
            return np.stack([0.5 * (fwd.min(axis=0) + bwd.min(axis=0)),
                             0.5 * (fwd.max(axis=0) + bwd.max(axis=0))])
        return np.stack([rows.min(axis=0), rows.max(axis=0)])

    total = None
    for lo_x, hi_x in zip(bounds, bounds[1:]):
        vals = adaptive_simpson(d_env, lo_x, hi_x, quad_tol)
        seg = FuzzyNumber.from_samples(g, *_snap_envelope(vals[0], vals[1]))
        total = seg if total is None else combine(total, seg, "+", grid=g)

    values = [F.value(x, g) for x in bounds]
    conditions = []
    tele = None
    for v0, v1 in zip(values, values[1:]):
        rep = p_difference(v1, v0, grid=g)
        conditions.append(rep.condition_used)
        if not rep.exists:
            raise NotPDifferentiable(
                "a segment difference does not exist; the telescoped identity "
                f"fails between values with condition {rep.condition_used}")
        tele = rep.result if tele is None else combine(tele, rep.result, "+", grid=g)

    dist = sup_distance(total, tele, grid=g)
    crisp_distance = None
    if all(v.is_crisp(1e-9) for v in values):
        classical = combine(values[-1], values[0], "-", grid=g)
        crisp_distance = sup_distance(total, classical, grid=g)
    return NewtonLeibnizReport(a, b, switches, total, tele, dist, dist < tol,
                               crisp_distance, conditions)
