"""Command-line front end.

Every command reads JSON descriptions (inline, or ``@path`` to load a file)
and writes a CSV level-set table to stdout or ``--out``.  Numbers are
formatted with %.12g so runs are byte-reproducible.  Auxiliary facts
(classification labels, existence flags, region profiles) ride along as
``#``-prefixed comment lines above the header.

Failures print a one-line JSON object to stderr and exit with 2 for bad
input (parse errors, invalid shapes, domain violations) or 3 when a
computation cannot be completed (non-finite values, quadrature or
integration failure, invalid level sets).

Fuzzy-number specs: a bare number, {"triangular": [a, b, c]},
{"trapezoidal": [a, b, c, d]}, or {"sampled": {"alpha": [...],
"lower": [...], "upper": [...]}}.

Function specs: {"func": "<expression in x>", "constants": {name: fuzzy
spec}, "domain": [a, b], "mode": "coefficient" | "endpoint"}.

Problem specs for ``solve``: see FdeProblem.from_spec.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .arith import SEMANTICS, arith as combine, gp_difference, p_difference
from . import calculus
from .core import AlphaGrid, FuzzyNumber, make_fuzzy
from .errors import COMPUTATION_ERRORS, FuzznumError, ParseError, SpecError
from .fde import FdeProblem, solve as fde_solve

_OP_MAP = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def _fmt(v) -> str:
    return f"{float(v):.12g}"


def _load_json(text: str, what: str):
    if text.startswith("@"):
        try:
            with open(text[1:], "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise SpecError(f"{what}: cannot read {text[1:]!r}: {exc}")
    else:
        raw = text
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{what}: invalid JSON: {exc}")


def _grid(args) -> AlphaGrid:
    n = getattr(args, "alpha_levels", None) or 101
    if n < 2:
        raise SpecError("--alpha-levels must be at least 2")
    return AlphaGrid.uniform(n)


def _open_out(args):
    path = getattr(args, "out", None)
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(args, lines):
    out, close = _open_out(args)
    try:
        out.write("\n".join(lines) + "\n")
    finally:
        if close:
            out.close()


def _level_table(fz: FuzzyNumber | None, grid: AlphaGrid, comments=()):
    lines = [f"# {c}" for c in comments]
    lines.append("alpha,lower,upper")
    if fz is not None:
        lo, hi = fz.cuts(grid)
        for a, l, u in zip(grid.levels, lo, hi):
            lines.append(f"{_fmt(a)},{_fmt(l)},{_fmt(u)}")
    return lines


def function_from_spec(d) -> calculus.FuzzyFunction:
    """Build a fuzzy-valued function from its JSON description."""
    if not isinstance(d, dict):
        raise SpecError("function spec must be a JSON object")
    for key in ("func", "domain"):
        if key not in d:
            raise SpecError(f"function spec is missing {key!r}")
    known = {"func", "constants", "domain", "mode", "t_resolution"}
    extra = set(d) - known
    if extra:
        raise SpecError(f"unknown function keys: {sorted(extra)}")
    dom = d["domain"]
    if not isinstance(dom, (list, tuple)) or len(dom) != 2 or not float(dom[0]) < float(dom[1]):
        raise SpecError("domain must be [a, b] with a < b")
    domain = (float(dom[0]), float(dom[1]))
    F = calculus.FuzzyFunction.from_expression(
        d["func"], d.get("constants", {}), domain,
        t_resolution=int(d.get("t_resolution", 9)))
    mode = d.get("mode", "coefficient")
    if mode == "coefficient":
        return F
    if mode != "endpoint":
        raise SpecError("mode must be 'coefficient' or 'endpoint'")

    # Endpoint view of the same pointwise values: per-level envelope of the
    # coefficient sweep, traversed by a single parameter.
    def lower(x, alphas):
        g = AlphaGrid(np.asarray(alphas, dtype=float))
        return F.family_values(x, g).min(axis=0)

    def upper(x, alphas):
        g = AlphaGrid(np.asarray(alphas, dtype=float))
        return F.family_values(x, g).max(axis=0)

    return calculus.FuzzyFunction.from_endpoints(lower, upper, domain)


# -- commands ---------------------------------------------------------------


def cmd_arith(args):
    grid = _grid(args)
    a = make_fuzzy(_load_json(args.a, "--a"))
    b = make_fuzzy(_load_json(args.b, "--b"))
    if args.op == "psub":
        rep = p_difference(a, b, grid=grid)
        comments = [f"exists: {str(rep.exists).lower()}",
                    f"condition: {rep.condition_used}"]
        _emit(args, _level_table(rep.result, grid, comments))
        return 0
    if args.op == "gpsub":
        _emit(args, _level_table(gp_difference(a, b, grid=grid), grid))
        return 0
    res = combine(a, b, _OP_MAP[args.op], sem=args.sem, grid=grid)
    _emit(args, _level_table(res, grid))
    return 0


def cmd_diff(args):
    grid = _grid(args)
    F = function_from_spec(_load_json(args.func, "--func"))
    if args.kind == "gp":
        val = calculus.gp_derivative(F, args.x, grid)
        _emit(args, _level_table(val, grid, [f"x: {_fmt(args.x)}", "kind: gp"]))
        return 0
    rep = calculus.p_derivative(F, args.x, grid)
    comments = [f"x: {_fmt(args.x)}", "kind: p",
                f"classification: {rep.classification}",
                f"exists: {str(rep.exists).lower()}"]
    if rep.detail:
        comments.append(f"detail: {rep.detail}")
    _emit(args, _level_table(rep.value, grid, comments))
    return 0


def cmd_integrate(args):
    grid = _grid(args)
    F = function_from_spec(_load_json(args.func, "--func"))
    a = F.domain[0] if args.a is None else args.a
    b = F.domain[1] if args.b is None else args.b
    val = calculus.integrate(F, a, b, grid, tol=args.tol)
    _emit(args, _level_table(val, grid, [f"from: {_fmt(a)}", f"to: {_fmt(b)}"]))
    return 0


def cmd_switch_points(args):
    grid = _grid(args)
    F = function_from_spec(_load_json(args.func, "--func"))
    regions = calculus.classification_profile(F, n_scan=args.scan, grid=grid)
    points = []
    for r1, r2 in zip(regions, regions[1:]):
        pair = (r1.label, r2.label)
        if pair == ("i_p", "d_p"):
            points.append((r1.x_hi, "typeI"))
        elif pair == ("d_p", "i_p"):
            points.append((r1.x_hi, "typeII"))
    lines = [f"# region: {_fmt(r.x_lo)} {_fmt(r.x_hi)} {r.label}" for r in regions]
    lines.append("x,kind")
    lines.extend(f"{_fmt(x)},{kind}" for x, kind in points)
    _emit(args, lines)
    return 0


def cmd_solve(args):
    spec = _load_json(args.spec, "--spec")
    if not isinstance(spec, dict):
        raise SpecError("--spec must be a JSON object")
    overrides = {"method": args.method, "alpha_levels": args.alpha_levels,
                 "step": args.step, "param_grid": args.param_grid,
                 "branch": args.branch}
    for key, val in overrides.items():
        if val is not None:
            spec[key] = val
    problem = FdeProblem.from_spec(spec)
    sol = fde_solve(problem)
    lines = [f"# method: {sol.method}"]
    lines.append("x,alpha,lower,upper")
    lines.extend(f"{_fmt(x)},{_fmt(al)},{_fmt(lo)},{_fmt(hi)}"
                 for x, al, lo, hi in sol.iter_rows())
    _emit(args, lines)
    if args.switch_out:
        doc = {
            "switches": [{"x": s.x, "kind": s.kind} for s in sol.switches],
            "crossings": list(sol.crossings),
            "branches": [{"x": x, "branch": br} for x, br in sol.branches],
        }
        with open(args.switch_out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


# -- wiring -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": "UsageError", "detail": message}),
              file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fuzznum",
                description="fuzzy-number arithmetic, calculus and "
                            "initial-value problems on level sets")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--alpha-levels", type=int, default=101,
                        help="number of uniform levels (default 101)")
        sp.add_argument("--out", default=None,
                        help="output path (default stdout)")

    sp = sub.add_parser("arith", help="combine two fuzzy numbers")
    sp.add_argument("--a", required=True, help="first operand (JSON or @file)")
    sp.add_argument("--b", required=True, help="second operand (JSON or @file)")
    sp.add_argument("--op", required=True,
                    choices=["add", "sub", "mul", "div", "psub", "gpsub"])
    sp.add_argument("--sem", default="standard",
                    choices=list(SEMANTICS),
                    help="sweep semantics for add/sub/mul/div")
    common(sp)
    sp.set_defaults(fn=cmd_arith)

    sp = sub.add_parser("diff", help="derivative of a fuzzy-valued function")
    sp.add_argument("--func", required=True, help="function spec (JSON or @file)")
    sp.add_argument("--x", required=True, type=float)
    sp.add_argument("--kind", default="p", choices=["p", "gp"])
    common(sp)
    sp.set_defaults(fn=cmd_diff)

    sp = sub.add_parser("integrate", help="level-wise integral")
    sp.add_argument("--func", required=True, help="function spec (JSON or @file)")
    sp.add_argument("--a", type=float, default=None,
                    help="lower limit (default: domain start)")
    sp.add_argument("--b", type=float, default=None,
                    help="upper limit (default: domain end)")
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(fn=cmd_integrate)

    sp = sub.add_parser("switch-points",
                        help="lateral-form switching points and profile")
    sp.add_argument("--func", required=True, help="function spec (JSON or @file)")
    sp.add_argument("--scan", type=int, default=2001,
                    help="scan resolution over the domain (default 2001)")
    common(sp)
    sp.set_defaults(fn=cmd_switch_points)

    sp = sub.add_parser("solve", help="fuzzy initial-value problem")
    sp.add_argument("--spec", required=True, help="problem spec (JSON or @file)")
    sp.add_argument("--method", default=None,
                    choices=["parametric", "coupled", "coupled-i", "coupled-d"])
    sp.add_argument("--alpha-levels", type=int, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--param-grid", type=int, default=None)
    sp.add_argument("--branch", default=None, choices=["i", "d"])
    sp.add_argument("--out", default=None)
    sp.add_argument("--switch-out", default=None,
                    help="also write switches/crossings/branches as JSON")
    sp.set_defaults(fn=cmd_solve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        doc = {"error": type(exc).__name__, "detail": str(exc),
               "offset": exc.offset, "expected": sorted(exc.expected)}
        print(json.dumps(doc), file=sys.stderr)
        return 2
    except FuzznumError as exc:
        doc = {"error": type(exc).__name__, "detail": str(exc)}
        print(json.dumps(doc), file=sys.stderr)
        return 3 if isinstance(exc, COMPUTATION_ERRORS) else 2


if __name__ == "__main__":
    sys.exit(main())
