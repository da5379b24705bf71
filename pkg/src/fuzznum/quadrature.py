"""Adaptive Simpson quadrature for scalar- or vector-valued integrands.

Vector integrands (one value per alpha level, say) share every evaluation
node, so differences of integrals inherit the sign structure of differences
of integrands.  That property keeps level-wise integrals properly nested
without any after-the-fact repair.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NonFiniteValue, QuadratureFailure

__all__ = ["adaptive_simpson"]


def _simpson(fa, fm, fb, h):
    return (h / 6.0) * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable, a: float, b: float, tol: float = 1e-10,
                     max_depth: int = 48):
    """Integrate f over [a, b] to the given absolute tolerance.

    f may return a float or a numpy array (constant shape).  Subdivision is
    driven by the worst component.  Raises QuadratureFailure if the depth
    limit is reached and NonFiniteValue if the integrand is not finite.
    """
    a = float(a)
    b = float(b)
    if a == b:
        probe = np.asarray(f(a), dtype=float)
        return np.zeros_like(probe) if probe.ndim else 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    def ev(x):
        y = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(y)):
            raise NonFiniteValue(f"integrand is not finite at x={x:g}")
        return y

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth, floor):
        x1 = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + x1)
        xr = 0.5 * (x1 + x2)
        fl = ev(xl)
        fr = ev(xr)
        left = _simpson(f0, fl, f1, x1 - x0)
        right = _simpson(f1, fr, f2, x2 - x1)
        err = (left + right - whole) / 15.0
        # The floor stops refinement once the Richardson correction could
        # no longer change the global result in float arithmetic; without
        # it an integrable cusp starves the halving tolerance budget.
        if np.max(np.abs(err)) <= max(eps, floor):
            return left + right + err
        if depth <= 0:
            raise QuadratureFailure(
                f"no convergence on [{x0:g}, {x2:g}] at tolerance {eps:g}")
        half = 0.5 * eps
        return (recurse(x0, x1, f0, fl, f1, left, half, depth - 1, floor)
                + recurse(x1, x2, f1, fr, f2, right, half, depth - 1, floor))

    fa = ev(a)
    fm = ev(0.5 * (a + b))
    fb = ev(b)
    whole = _simpson(fa, fm, fb, b - a)
    floor = 4.0 * np.finfo(float).eps * float(np.max(np.abs(whole)) + 1.0)
    out = recurse(a, b, fa, fm, fb, whole, tol, max_depth, floor)
    return sign * out
