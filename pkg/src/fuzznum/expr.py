"""A small expression language for right-hand sides and fuzzy-valued terms.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? atom ('^' int)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

Function idents are sin, cos, exp, ln, abs.  The variables are ``x`` and
``Y``.  Any other identifier is a named constant; binding a parsed tree to a
mapping of fuzzy numbers assigns one traversal-parameter slot per distinct
name, ordered by first appearance, so a name used twice shares its sweep.

``eval_crisp`` evaluates the tree with every constant fixed at its
parametric point c_j(t_j, alpha); the result is affine in each t_j whenever
the constant appears once and outside nonlinear calls, which the collinearity
probe below verifies numerically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import FuzzyNumber, FuzzyVector, make_fuzzy
from .errors import NonFiniteValue, ParseError, SpecError

__all__ = [
    "Node", "Num", "Var", "Const", "Neg", "Bin", "Pow", "Call",
    "parse", "to_string", "differentiate", "const_names",
    "BoundExpr", "bind",
]

FUNCTIONS = ("sin", "cos", "exp", "ln", "abs")
VARIABLES = ("x", "Y")


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Const(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Bin(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    power: int


@dataclass(frozen=True)
class Call(Node):
    fn: str
    arg: Node


# -- tokenizer ----------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos,
                             {"number", "identifier", "operator"})
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind == "op" and text == op:
            return self.advance()
        raise ParseError(f"expected {op!r}", pos, {repr(op)})

    def fail(self, expected: set[str]):
        kind, text, pos = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", pos, expected)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {text!r}", pos, {"'+'", "'-'", "'*'", "'/'", "end"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = Bin(text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = Bin(text, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, text, _ = self.peek()
        negate = False
        if kind == "op" and text == "-":
            self.advance()
            negate = True
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            node = Pow(node, self.integer())
        return Neg(node) if negate else node

    def integer(self) -> int:
        sign = 1
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
            kind, text, pos = self.peek()
        if kind != "number" or not re.fullmatch(r"\d+", text):
            raise ParseError("exponent must be an integer", pos, {"integer"})
        self.advance()
        return sign * int(text)

    def atom(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            nk, nt, _ = self.peek()
            if nk == "op" and nt == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos, set(FUNCTIONS))
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in VARIABLES:
                return Var(text)
            return Const(text)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail({"number", "identifier", "'('", "'-'"})


def parse(src: str) -> Node:
    """Parse source text to a tree; raises ParseError with byte offset."""
    return _Parser(src).parse()


def const_names(node: Node) -> tuple[str, ...]:
    """Distinct constant names in first-appearance order."""
    seen: list[str] = []

    def walk(n: Node):
        if isinstance(n, Const):
            if n.name not in seen:
                seen.append(n.name)
        elif isinstance(n, Neg):
            walk(n.arg)
        elif isinstance(n, Bin):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Pow):
            walk(n.base)
        elif isinstance(n, Call):
            walk(n.arg)

    walk(node)
    return tuple(seen)


def to_string(node: Node) -> str:
    """Render a tree back to parseable text (round-trips through parse)."""
    def prec(n: Node) -> int:
        if isinstance(n, Bin):
            return 1 if n.op in "+-" else 2
        if isinstance(n, Neg):
            return 3
        return 9

    def render(n: Node) -> str:
        if isinstance(n, Num):
            return f"{n.value:.12g}"
        if isinstance(n, (Var, Const)):
            return n.name
        if isinstance(n, Neg):
            inner = render(n.arg)
            if prec(n.arg) < 9 and not isinstance(n.arg, (Call, Pow)):
                inner = f"({inner})"
            return f"-{inner}"
        if isinstance(n, Call):
            return f"{n.fn}({render(n.arg)})"
        if isinstance(n, Pow):
            base = render(n.base)
            if not isinstance(n.base, (Num, Var, Const, Call)):
                base = f"({base})"
            if isinstance(n.base, Num) and n.base.value < 0:
                base = f"({base})"
            return f"{base}^{n.power}" if n.power >= 0 else f"{base}^-{-n.power}"
        if isinstance(n, Bin):
            left = render(n.left)
            right = render(n.right)
            if prec(n.left) < prec(n):
                left = f"({left})"
            rp = prec(n.right)
            if rp < prec(n) or (rp == prec(n) and n.op in "-/"):
                right = f"({right})"
            return f"{left}{n.op}{right}"
        raise SpecError(f"cannot render node {n!r}")

    return render(node)


def differentiate(node: Node, var: str = "x") -> Node:
    """Symbolic derivative with respect to one variable.

    abs is differentiated as abs(u)/u * u', which is correct away from the
    kink and evaluates non-finite exactly at it; numeric fallbacks elsewhere
    handle kinks explicitly.
    """
    ZERO = Num(0.0)
    ONE = Num(1.0)

    def d(n: Node) -> Node:
        if isinstance(n, Num) or isinstance(n, Const):
            return ZERO
        if isinstance(n, Var):
            return ONE if n.name == var else ZERO
        if isinstance(n, Neg):
            return Neg(d(n.arg))
        if isinstance(n, Bin):
            if n.op == "+":
                return Bin("+", d(n.left), d(n.right))
            if n.op == "-":
                return Bin("-", d(n.left), d(n.right))
            if n.op == "*":
                return Bin("+", Bin("*", d(n.left), n.right), Bin("*", n.left, d(n.right)))
            if n.op == "/":
                num = Bin("-", Bin("*", d(n.left), n.right), Bin("*", n.left, d(n.right)))
                return Bin("/", num, Pow(n.right, 2))
        if isinstance(n, Pow):
            if n.power == 0:
                return ZERO
            return Bin("*", Bin("*", Num(float(n.power)), Pow(n.base, n.power - 1)), d(n.base))
        if isinstance(n, Call):
            u = n.arg
            du = d(u)
            if n.fn == "sin":
                outer = Call("cos", u)
            elif n.fn == "cos":
                outer = Neg(Call("sin", u))
            elif n.fn == "exp":
                outer = Call("exp", u)
            elif n.fn == "ln":
                outer = Bin("/", ONE, u)
            elif n.fn == "abs":
                outer = Bin("/", Call("abs", u), u)
            else:
                raise SpecError(f"cannot differentiate call {n.fn!r}")
            return Bin("*", outer, du)
        raise SpecError(f"cannot differentiate node {n!r}")

    return _simplify(d(node))


def _is_num(n: Node, v: float | None = None) -> bool:
    return isinstance(n, Num) and (v is None or n.value == v)


def _simplify(n: Node) -> Node:
    """Light constant folding; keeps derivative trees readable and cheap."""
    if isinstance(n, Neg):
        a = _simplify(n.arg)
        if _is_num(a):
            return Num(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(n, Bin):
        a = _simplify(n.left)
        b = _simplify(n.right)
        if _is_num(a) and _is_num(b):
            if n.op == "+":
                return Num(a.value + b.value)
            if n.op == "-":
                return Num(a.value - b.value)
            if n.op == "*":
                return Num(a.value * b.value)
            if n.op == "/" and b.value != 0:
                return Num(a.value / b.value)
        if n.op == "+":
            if _is_num(a, 0.0):
                return b
            if _is_num(b, 0.0):
                return a
        if n.op == "-":
            if _is_num(b, 0.0):
                return a
            if _is_num(a, 0.0):
                return Neg(b) if not _is_num(b) else Num(-b.value)
        if n.op == "*":
            if _is_num(a, 0.0) or _is_num(b, 0.0):
                return Num(0.0)
            if _is_num(a, 1.0):
                return b
            if _is_num(b, 1.0):
                return a
        if n.op == "/":
            if _is_num(a, 0.0):
                return Num(0.0)
            if _is_num(b, 1.0):
                return a
        return Bin(n.op, a, b)
    if isinstance(n, Pow):
        base = _simplify(n.base)
        if n.power == 0:
            return Num(1.0)
        if n.power == 1:
            return base
        if _is_num(base):
            return Num(base.value ** n.power)
        return Pow(base, n.power)
    if isinstance(n, Call):
        return Call(n.fn, _simplify(n.arg))
    return n


# -- evaluation ----------------------------------------------------------

_CALLS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "ln": np.log,
    "abs": np.abs,
}


def _eval(node: Node, x, y, consts: Mapping[str, object]):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name == "x":
            return x
        if y is None:
            raise SpecError("expression uses Y but no Y value was supplied")
        return y
    if isinstance(node, Const):
        return consts[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, x, y, consts)
    if isinstance(node, Bin):
        a = _eval(node.left, x, y, consts)
        b = _eval(node.right, x, y, consts)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        base = _eval(node.base, x, y, consts)
        if node.power < 0:
            return 1.0 / base ** (-node.power)
        return base ** node.power
    if isinstance(node, Call):
        return _CALLS[node.fn](_eval(node.arg, x, y, consts))
    raise SpecError(f"cannot evaluate node {node!r}")


def eval_tree(node: Node, x=0.0, y=None, consts: Mapping[str, object] | None = None,
              check: bool = True):
    """Evaluate a tree; scalars and broadcastable arrays both work."""
    if isinstance(x, (int, float)):
        x = np.float64(x)
    if isinstance(y, (int, float)):
        y = np.float64(y)
    with np.errstate(all="ignore"):
        try:
            out = _eval(node, x, y, consts or {})
        except ZeroDivisionError:
            raise NonFiniteValue("division by zero while evaluating expression") from None
    if check:
        arr = np.asarray(out)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"expression evaluated non-finite at x={x!r}")
    return out


class BoundExpr:
    """A parsed expression with its named constants bound to fuzzy numbers.

    Slot j corresponds to the j-th distinct constant name; sweeping slot j
    with parameter t_j traverses that constant's cut in nondecreasing mode.
    """

    __slots__ = ("tree", "names", "constants", "source")

    def __init__(self, tree: Node, names: tuple[str, ...], constants: FuzzyVector,
                 source: str | None = None):
        self.tree = tree
        self.names = names
        self.constants = constants
        self.source = source if source is not None else to_string(tree)

    @property
    def arity(self) -> int:
        return len(self.names)

    def const_values(self, t, alpha) -> np.ndarray:
        """Constant values at sweep parameters t (shape (k,)) and one level."""
        return self.constants.param_values(t, alpha)

    def eval_crisp(self, x, y=None, t=(), alpha: float = 1.0, check: bool = True):
        """Evaluate with constants at their parametric points."""
        t = np.atleast_1d(np.asarray(t, dtype=float)) if self.arity else np.zeros(0)
        vals = self.const_values(t, alpha)
        consts = dict(zip(self.names, vals))
        return eval_tree(self.tree, x, y, consts, check=check)

    def eval_with_consts(self, x, y, const_values, check: bool = False):
        """Fast path: constants already realized (arrays broadcast freely)."""
        consts = dict(zip(self.names, const_values))
        return eval_tree(self.tree, x, y, consts, check=check)

    def derivative(self, var: str = "x") -> "BoundExpr":
        return BoundExpr(differentiate(self.tree, var), self.names, self.constants)

    def __repr__(self) -> str:
        return f"BoundExpr({self.source!r}, constants={list(self.names)})"


def bind(src_or_tree, constants: Mapping[str, FuzzyNumber | dict | float]) -> BoundExpr:
    """Bind an expression's named constants to fuzzy numbers.

    Every constant appearing in the expression must be present in the
    mapping; JSON shape objects and bare numbers are accepted and coerced.
    """
    if isinstance(src_or_tree, str):
        tree = parse(src_or_tree)
        source = src_or_tree
    else:
        tree = src_or_tree
        source = None
    names = const_names(tree)
    missing = [n for n in names if n not in constants]
    if missing:
        raise SpecError(f"unbound constants: {', '.join(missing)}")
    vec = FuzzyVector([make_fuzzy(constants[n]) for n in names])
    return BoundExpr(tree, names, vec, source)


# -- affinity probes ------------------------------------------------------

def _probe_points(rng: np.random.Generator, n: int):
    xs = rng.uniform(-2.0, 2.0, n)
    ys = rng.uniform(-2.0, 2.0, n)
    alphas = rng.uniform(0.0, 1.0, n)
    return xs, ys, alphas


def is_affine_in_slot(bound: BoundExpr, j: int, n_probe: int = 8,
                      rel_tol: float = 1e-9, seed: int = 0) -> bool:
    """Three-point collinearity test for slot j of the sweep."""
    rng = np.random.default_rng(seed + 7 * j)
    xs, ys, alphas = _probe_points(rng, n_probe)
    k = bound.arity
    for x, y, alpha in zip(xs, ys, alphas):
        base = rng.uniform(0.0, 1.0, k)
        vals = []
        ok = True
        for tj in (0.0, 0.5, 1.0):
            t = base.copy()
            t[j] = tj
            try:
                v = float(bound.eval_crisp(x, y, t, alpha))
            except NonFiniteValue:
                ok = False
                break
            vals.append(v)
        if not ok:
            continue
        v0, vh, v1 = vals
        scale = max(1.0, abs(v0), abs(v1))
        if abs(v0 + v1 - 2.0 * vh) > rel_tol * scale:
            return False
    return True


def is_affine_in_y(bound: BoundExpr, n_probe: int = 8, rel_tol: float = 1e-9,
                   seed: int = 1) -> bool:
    """Collinearity of the expression in the Y variable."""
    rng = np.random.default_rng(seed)
    xs, ys, alphas = _probe_points(rng, n_probe)
    k = bound.arity
    for x, y, alpha in zip(xs, ys, alphas):
        t = rng.uniform(0.0, 1.0, k)
        try:
            v0 = float(bound.eval_crisp(x, y - 1.0, t, alpha))
            vh = float(bound.eval_crisp(x, y, t, alpha))
            v1 = float(bound.eval_crisp(x, y + 1.0, t, alpha))
        except NonFiniteValue:
            continue
        scale = max(1.0, abs(v0), abs(v1))
        if abs(v0 + v1 - 2.0 * vh) > rel_tol * scale:
            return False
    return True
