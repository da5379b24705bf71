"""Fuzzy numbers as stacked alpha-level intervals.

A fuzzy number is represented by its level sets [lower(alpha), upper(alpha)]
for alpha in [0, 1].  Validity means exactly three things: lower endpoints do
not decrease with alpha, upper endpoints do not increase, and at alpha = 1 the
lower endpoint does not exceed the upper one.  Everything in this package is
built on that characterization rather than on membership functions directly.

Three shapes are supported: triangular(a, b, c) and trapezoidal(a, b, c, d)
evaluate their cut endpoints exactly at any level, and sampled numbers carry
explicit endpoint arrays over an increasing grid of levels and interpolate
linearly in between.

Each cut can also be traversed parametrically: value(t) = lower + t * (upper
- lower) walks the interval from the lower endpoint (nondecreasing mode), and
value(t) = upper + t * (lower - upper) walks it from the upper endpoint
(nonincreasing mode).  The two modes describe the same set and satisfy
value_nondecr(t) = value_nonincr(1 - t); arithmetic and calculus are defined
in terms of these parameter sweeps.

All values are immutable: sampled arrays are stored read-only, and every
operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import (
    CrossingViolation,
    MonotonicityViolation,
    NonFiniteValue,
    SpecError,
)

__all__ = [
    "AlphaGrid",
    "DEFAULT_GRID",
    "LevelInterval",
    "FuzzyNumber",
    "FuzzyVector",
    "make_fuzzy",
    "fuzzy_to_json",
    "param_value",
    "zadeh_extend",
]

#: Absolute tolerance for monotonicity and crossing checks on constructed values.
VALIDATION_TOL = 1e-12


def _readonly(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float).copy()
    arr.setflags(write=False)
    return arr


class AlphaGrid:
    """An increasing grid of membership levels running from 0 to 1."""

    __slots__ = ("levels",)

    def __init__(self, levels: Sequence[float]):
        arr = _readonly(levels)
        if arr.ndim != 1 or arr.size < 2:
            raise SpecError("an alpha grid needs at least the two levels 0 and 1")
        if not (np.all(np.diff(arr) > 0)):
            raise SpecError("alpha levels must be strictly increasing")
        if abs(arr[0]) > VALIDATION_TOL or abs(arr[-1] - 1.0) > VALIDATION_TOL:
            raise SpecError("alpha levels must start at 0 and end at 1")
        self.levels = arr

    @classmethod
    def uniform(cls, n: int = 101) -> "AlphaGrid":
        if n < 2:
            raise SpecError("a uniform grid needs at least 2 levels")
        return cls(np.linspace(0.0, 1.0, n))

    def __len__(self) -> int:
        return self.levels.size

    def __iter__(self) -> Iterator[float]:
        return iter(self.levels)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlphaGrid) and np.array_equal(self.levels, other.levels)

    def __hash__(self) -> int:
        return hash(self.levels.tobytes())

    def __repr__(self) -> str:
        return f"AlphaGrid({len(self)} levels)"

    def index_near(self, alpha: float) -> int:
        """Index of the grid level closest to ``alpha``."""
        return int(np.argmin(np.abs(self.levels - alpha)))


#: Shared default resolution: 101 uniform levels.
DEFAULT_GRID = AlphaGrid.uniform(101)


def _grid_or_default(grid: AlphaGrid | None) -> AlphaGrid:
    return DEFAULT_GRID if grid is None else grid


@dataclass(frozen=True)
class LevelInterval:
    """One alpha-cut: a closed interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise NonFiniteValue(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            if lo - hi <= VALIDATION_TOL:
                mid = 0.5 * (lo + hi)
                lo = hi = mid
            else:
                raise CrossingViolation(f"interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __iter__(self):
        # supports ``lo, hi = interval``
        return iter((self.lo, self.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, other: "LevelInterval", tol: float = VALIDATION_TOL) -> bool:
        return self.lo <= other.lo + tol and other.hi <= self.hi + tol

    def param_value(self, t: float, mode: str = "nondecreasing") -> float:
        return param_value(self.lo, self.hi, t, mode)


def param_value(lo, hi, t, mode: str = "nondecreasing"):
    """Parametric traversal of an interval.

    Nondecreasing mode starts at the lower endpoint, nonincreasing mode at
    the upper endpoint; t runs over [0, 1].  Accepts scalars or arrays.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    t = np.asarray(t, dtype=float)
    if mode == "nondecreasing":
        out = lo + t * (hi - lo)
    elif mode == "nonincreasing":
        out = hi + t * (lo - hi)
    else:
        raise SpecError(f"unknown traversal mode {mode!r}")
    return out if out.ndim else float(out)


class FuzzyNumber:
    """A fuzzy number, stored as an exact shape or as sampled level sets."""

    __slots__ = ("kind", "params", "grid", "_lo", "_hi")

    def __init__(self, kind: str, params: tuple = (), grid: AlphaGrid | None = None,
                 lower=None, upper=None):
        # Internal constructor; use the classmethods below.
        self.kind = kind
        self.params = tuple(float(p) for p in params)
        if kind == "sampled":
            self.grid = grid
            self._lo = _readonly(lower)
            self._hi = _readonly(upper)
        else:
            self.grid = None
            self._lo = None
            self._hi = None

    # -- constructors -------------------------------------------------

    @classmethod
    def triangular(cls, a: float, b: float, c: float) -> "FuzzyNumber":
        """Triangular number with support [a, c] and peak b."""
        if not (a <= b <= c):
            raise MonotonicityViolation(f"triangular parameters must satisfy a <= b <= c, got {(a, b, c)}")
        return cls("triangular", (a, b, c))

    @classmethod
    def trapezoidal(cls, a: float, b: float, c: float, d: float) -> "FuzzyNumber":
        """Trapezoidal number with support [a, d] and core [b, c]."""
        if not (a <= b <= c <= d):
            raise MonotonicityViolation(
                f"trapezoidal parameters must satisfy a <= b <= c <= d, got {(a, b, c, d)}")
        return cls("trapezoidal", (a, b, c, d))

    @classmethod
    def crisp(cls, v: float) -> "FuzzyNumber":
        return cls("triangular", (v, v, v))

    @classmethod
    def from_samples(cls, grid, lower, upper) -> "FuzzyNumber":
        """Build a sampled number, validating the level-set conditions.

        Raises MonotonicityViolation or CrossingViolation rather than
        repairing bad input; tiny float noise up to 1e-12 is tolerated.
        """
        if not isinstance(grid, AlphaGrid):
            grid = AlphaGrid(grid)
        lo = np.asarray(lower, dtype=float)
        hi = np.asarray(upper, dtype=float)
        if lo.shape != (len(grid),) or hi.shape != (len(grid),):
            raise SpecError("endpoint arrays must match the alpha grid length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise NonFiniteValue("level-set endpoints must be finite")
        if np.any(np.diff(lo) < -VALIDATION_TOL):
            k = int(np.argmin(np.diff(lo)))
            raise MonotonicityViolation(
                f"lower endpoints decrease between alpha={grid.levels[k]:g} and {grid.levels[k + 1]:g}")
        if np.any(np.diff(hi) > VALIDATION_TOL):
            k = int(np.argmax(np.diff(hi)))
            raise MonotonicityViolation(
                f"upper endpoints increase between alpha={grid.levels[k]:g} and {grid.levels[k + 1]:g}")
        if lo[-1] > hi[-1] + VALIDATION_TOL:
            raise CrossingViolation(
                f"at alpha=1 the lower endpoint {lo[-1]} exceeds the upper endpoint {hi[-1]}")
        if lo[-1] > hi[-1]:
            # Tolerated float noise at the core; snap so every cut is ordered.
            m = 0.5 * (lo[-1] + hi[-1])
            lo = np.minimum(lo, m)
            hi = np.maximum(hi, m)
        return cls("sampled", (), grid, lo, hi)

    # -- level sets ----------------------------------------------------

    def lower(self, alpha):
        """Lower cut endpoint at one level or an array of levels."""
        a = np.asarray(alpha, dtype=float)
        if self.kind == "triangular":
            p, q, _ = self.params
            out = p + a * (q - p)
        elif self.kind == "trapezoidal":
            p, q, _, _ = self.params
            out = p + a * (q - p)
        else:
            out = np.interp(a, self.grid.levels, self._lo)
        return out if out.ndim else float(out)

    def upper(self, alpha):
        """Upper cut endpoint at one level or an array of levels."""
        a = np.asarray(alpha, dtype=float)
        if self.kind == "triangular":
            _, q, r = self.params
            out = r - a * (r - q)
        elif self.kind == "trapezoidal":
            _, _, q, r = self.params
            out = r - a * (r - q)
        else:
            out = np.interp(a, self.grid.levels, self._hi)
        return out if out.ndim else float(out)

    def cuts(self, grid: AlphaGrid | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays over a grid (both of shape (len(grid),))."""
        g = _grid_or_default(grid)
        if self.kind == "sampled" and g == self.grid:
            return self._lo.copy(), self._hi.copy()
        return self.lower(g.levels), self.upper(g.levels)

    def alpha_cut(self, alpha: float) -> LevelInterval:
        return LevelInterval(self.lower(alpha), self.upper(alpha))

    def support(self) -> LevelInterval:
        return self.alpha_cut(0.0)

    def core(self) -> LevelInterval:
        return self.alpha_cut(1.0)

    def param_value(self, t, alpha, mode: str = "nondecreasing"):
        """Parametric point of the alpha-cut; see :func:`param_value`."""
        return param_value(self.lower(alpha), self.upper(alpha), t, mode)

    def is_crisp(self, tol: float = VALIDATION_TOL) -> bool:
        lo, hi = self.cuts(self.grid or DEFAULT_GRID)
        return bool(np.max(hi - lo) <= tol)

    def resample(self, grid: AlphaGrid | None = None) -> "FuzzyNumber":
        g = _grid_or_default(grid)
        lo, hi = self.cuts(g)
        return FuzzyNumber.from_samples(g, lo, hi)

    # -- arithmetic sugar (standard level-wise semantics) ---------------

    def __add__(self, other):
        from .arith import arith, scalar_mul
        if isinstance(other, FuzzyNumber):
            return arith(self, other, "+")
        if isinstance(other, (int, float)):
            return arith(self, FuzzyNumber.crisp(other), "+")
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        from .arith import arith, scalar_mul
        if isinstance(other, FuzzyNumber):
            return arith(self, other, "-")
        if isinstance(other, (int, float)):
            return arith(self, FuzzyNumber.crisp(other), "-")
        return NotImplemented

    def __rsub__(self, other):
        from .arith import arith, scalar_mul
        if isinstance(other, (int, float)):
            return arith(FuzzyNumber.crisp(other), self, "-")
        return NotImplemented

    def __mul__(self, other):
        from .arith import arith, scalar_mul
        if isinstance(other, FuzzyNumber):
            return arith(self, other, "*")
        if isinstance(other, (int, float)):
            return scalar_mul(other, self)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        from .arith import arith, scalar_mul
        if isinstance(other, FuzzyNumber):
            return arith(self, other, "/")
        if isinstance(other, (int, float)):
            return scalar_mul(1.0 / other, self)
        return NotImplemented

    def __neg__(self):
        from .arith import arith, scalar_mul
        return scalar_mul(-1.0, self)

    def __repr__(self) -> str:
        if self.kind == "triangular":
            return "triangular(%g, %g, %g)" % self.params
        if self.kind == "trapezoidal":
            return "trapezoidal(%g, %g, %g, %g)" % self.params
        s = self.support()
        c = self.core()
        return (f"sampled({len(self.grid)} levels, support [{s.lo:g}, {s.hi:g}], "
                f"core [{c.lo:g}, {c.hi:g}])")


class FuzzyVector:
    """An ordered tuple of fuzzy numbers, used for coefficient vectors."""

    __slots__ = ("items",)

    def __init__(self, items: Sequence[FuzzyNumber]):
        items = tuple(items)
        for it in items:
            if not isinstance(it, FuzzyNumber):
                raise SpecError("FuzzyVector entries must be FuzzyNumber instances")
        self.items = items

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i) -> FuzzyNumber:
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def cut_arrays(self, alphas) -> tuple[np.ndarray, np.ndarray]:
        """Stacked endpoint arrays of shape (k, len(alphas))."""
        lo = np.stack([f.lower(alphas) for f in self.items])
        hi = np.stack([f.upper(alphas) for f in self.items])
        return lo, hi

    def param_values(self, t, alpha) -> np.ndarray:
        """Entry j traversed at parameter t[j], all in nondecreasing mode."""
        t = np.asarray(t, dtype=float)
        if t.shape != (len(self),):
            raise SpecError(f"expected {len(self)} traversal parameters, got shape {t.shape}")
        return np.array([f.param_value(tj, alpha) for f, tj in zip(self.items, t)])

    def __repr__(self) -> str:
        return f"FuzzyVector({list(self.items)!r})"


# -- JSON encoding ------------------------------------------------------

def make_fuzzy(spec) -> FuzzyNumber:
    """Build a fuzzy number from its JSON-style description.

    Accepted forms: {"triangular": [a, b, c]}, {"trapezoidal": [a, b, c, d]},
    {"sampled": {"alpha": [...], "lower": [...], "upper": [...]}}, a bare
    number (treated as crisp), or an existing FuzzyNumber (passed through).
    """
    if isinstance(spec, FuzzyNumber):
        return spec
    if isinstance(spec, (int, float)):
        return FuzzyNumber.crisp(float(spec))
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SpecError(f"expected a one-key shape object, got {spec!r}")
    (kind, body), = spec.items()
    if kind == "triangular":
        if not isinstance(body, (list, tuple)) or len(body) != 3:
            raise SpecError("triangular takes [a, b, c]")
        return FuzzyNumber.triangular(*body)
    if kind == "trapezoidal":
        if not isinstance(body, (list, tuple)) or len(body) != 4:
            raise SpecError("trapezoidal takes [a, b, c, d]")
        return FuzzyNumber.trapezoidal(*body)
    if kind == "sampled":
        if not isinstance(body, dict) or set(body) != {"alpha", "lower", "upper"}:
            raise SpecError('sampled takes {"alpha": [...], "lower": [...], "upper": [...]}')
        return FuzzyNumber.from_samples(body["alpha"], body["lower"], body["upper"])
    raise SpecError(f"unknown fuzzy shape {kind!r}")


def fuzzy_to_json(f: FuzzyNumber) -> dict:
    """Inverse of :func:`make_fuzzy`; exact shapes keep their parameters."""
    if f.kind == "triangular":
        return {"triangular": list(f.params)}
    if f.kind == "trapezoidal":
        return {"trapezoidal": list(f.params)}
    return {"sampled": {"alpha": f.grid.levels.tolist(),
                        "lower": f._lo.tolist(),
                        "upper": f._hi.tolist()}}


# -- Zadeh extension ----------------------------------------------------

_INVGOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_refine(f: Callable, a: float, b: float, minimize: bool, iters: int = 64) -> float:
    """Golden-section search for one extremum of f on [a, b]."""
    sign = 1.0 if minimize else -1.0
    x1 = b - _INVGOLD * (b - a)
    x2 = a + _INVGOLD * (b - a)
    f1 = sign * float(f(x1))
    f2 = sign * float(f(x2))
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVGOLD * (b - a)
            f1 = sign * float(f(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVGOLD * (b - a)
            f2 = sign * float(f(x2))
    return sign * min(f1, f2)


def _eval_vectorized(f: Callable, xs: np.ndarray) -> np.ndarray:
    try:
        ys = np.asarray(f(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except Exception:
        pass
    return np.asarray([float(f(x)) for x in xs], dtype=float)


def zadeh_extend(f: Callable, u: FuzzyNumber, grid: AlphaGrid | None = None,
                 samples: int = 1025) -> FuzzyNumber:
    """Image of a fuzzy number under a continuous univariate map.

    Level-wise: the cut of the image at alpha is [min f, max f] over the
    alpha-cut of ``u``.  Each cut is sampled densely (default 1025 points,
    endpoints included); every detected interior extremum and both boundary
    cells get one golden-section refinement.  For monotone f this reduces
    to mapping the endpoints, which the dense sample reproduces exactly.
    """
    g = _grid_or_default(grid)
    lo_out = np.empty(len(g))
    hi_out = np.empty(len(g))
    for i, alpha in enumerate(g.levels):
        cut = u.alpha_cut(float(alpha))
        if cut.width == 0.0:
            y = float(f(cut.lo))
            if not np.isfinite(y):
                raise NonFiniteValue(f"f({cut.lo}) is not finite")
            lo_out[i] = hi_out[i] = y
            continue
        xs = np.linspace(cut.lo, cut.hi, samples)
        with np.errstate(all="ignore"):
            ys = _eval_vectorized(f, xs)
        if not np.all(np.isfinite(ys)):
            bad = xs[~np.isfinite(ys)][0]
            raise NonFiniteValue(f"f({bad}) is not finite on the support of the operand")
        mn = float(ys.min())
        mx = float(ys.max())
        interior = np.arange(1, samples - 1)
        local_min = interior[(ys[1:-1] < ys[:-2]) & (ys[1:-1] < ys[2:])]
        local_max = interior[(ys[1:-1] > ys[:-2]) & (ys[1:-1] > ys[2:])]
        for j in local_min:
            mn = min(mn, _golden_refine(f, xs[j - 1], xs[j + 1], minimize=True))
        for j in local_max:
            mx = max(mx, _golden_refine(f, xs[j - 1], xs[j + 1], minimize=False))
        # A turning point inside the first or last cell never forms a
        # three-point bracket, so refine the boundary cells as well.
        mn = min(mn, _golden_refine(f, xs[0], xs[1], minimize=True),
                 _golden_refine(f, xs[-2], xs[-1], minimize=True))
        mx = max(mx, _golden_refine(f, xs[0], xs[1], minimize=False),
                 _golden_refine(f, xs[-2], xs[-1], minimize=False))
        lo_out[i] = mn
        hi_out[i] = mx
    # Nested inputs give nested images; enforce the residual sampling noise
    # away so the constructed number always validates.
    lo_out = np.maximum.accumulate(lo_out)
    hi_out = np.minimum.accumulate(hi_out)
    mid = 0.5 * (lo_out[-1] + hi_out[-1])
    lo_out = np.minimum(lo_out, mid)
    hi_out = np.maximum(hi_out, mid)
    return FuzzyNumber.from_samples(g, lo_out, hi_out)
