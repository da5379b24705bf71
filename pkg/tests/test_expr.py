"""Expression grammar, evaluation with fuzzy constants, affinity probes."""

import numpy as np
import pytest

from fuzznum import FuzzyNumber
from fuzznum.errors import NonFiniteValue, ParseError, SpecError
from fuzznum.expr import (bind, differentiate, eval_tree, is_affine_in_slot,
                          is_affine_in_y, parse, to_string)


# -- grammar ------------------------------------------------------------------


@pytest.mark.parametrize("src", [
    "-Y + C1*cos(x)",
    "0.05*Y + K",
    "A*(cos(x) - x^2/32)",
    "x*exp(-x) + B*(exp(-x*x) + x - x*exp(-x))",
    "1 - 2/(1 + exp(3*x))",
    "abs(x - 1) + ln(x + 10)",
    "-(-x)^3",
])
def test_print_parse_round_trip(src):
    tree = parse(src)
    printed = to_string(tree)
    again = parse(printed)
    assert to_string(again) == printed
    # and the reparse evaluates identically
    consts = {"C1": 1.25, "K": -2.0, "A": 0.5, "B": 2.0}
    for x in (0.1, 1.7, 3.0):
        v1 = eval_tree(tree, x, y=0.3, consts=consts)
        v2 = eval_tree(again, x, y=0.3, consts=consts)
        assert v1 == pytest.approx(v2, rel=1e-15)


def test_unclosed_call_reports_offset_and_expectations():
    with pytest.raises(ParseError) as info:
        parse("sin(")
    assert info.value.offset == 4
    assert len(info.value.expected) > 0


@pytest.mark.parametrize("src", ["", "1 +", "2 ** 3", "x^y", "sin 3", "(1", "1)2"])
def test_malformed_inputs_raise_parse_errors(src):
    with pytest.raises(ParseError):
        parse(src)


def test_integer_exponents_only():
    assert eval_tree(parse("x^3"), 2.0) == pytest.approx(8.0)
    with pytest.raises(ParseError):
        parse("x^2.5")


# -- evaluation with fuzzy constants -----------------------------------------


def test_eval_at_a_sweep_corner():
    b = bind("-Y + C1*cos(x)", {"C1": FuzzyNumber.triangular(-2, 1, 4)})
    assert b.eval_crisp(0.0, 0.0, [1.0], alpha=0.0) == pytest.approx(4.0)
    assert b.eval_crisp(0.0, 0.0, [0.0], alpha=0.0) == pytest.approx(-2.0)


def test_eval_at_full_grade_ignores_the_sweep():
    b = bind("-Y + C1*cos(x)", {"C1": FuzzyNumber.triangular(-2, 1, 4)})
    x, y = 0.8, -0.4
    want = 1.0 * np.cos(x) - y
    for t in (0.0, 0.3, 1.0):
        assert b.eval_crisp(x, y, [t], alpha=1.0) == pytest.approx(want, abs=1e-12)


def test_eval_linear_growth_problem_corner():
    b = bind("0.05*Y + K", {"K": FuzzyNumber.triangular(-160, 0, 160)})
    assert b.eval_crisp(0.0, 3000.0, [0.0], alpha=0.0) == pytest.approx(-10.0)


def test_repeated_constant_shares_one_slot():
    b = bind("A*x + A*x^2", {"A": FuzzyNumber.triangular(0, 1, 2)})
    assert b.arity == 1
    # slot at t=0.75, alpha=0.5: A traverses 0.5 + 0.75*(1.5-0.5)
    a_val = 0.5 + 0.75 * 1.0
    x = 2.0
    assert b.eval_crisp(x, t=[0.75], alpha=0.5) == pytest.approx(
        a_val * x + a_val * x * x, abs=1e-12)


def test_bind_rejects_missing_constants():
    with pytest.raises(SpecError):
        bind("A*x + B", {"A": 1.0})


def test_bind_accepts_json_shapes_and_numbers():
    b = bind("A*x + B", {"A": {"triangular": [0, 1, 2]}, "B": 3.5})
    assert b.arity == 2
    assert b.eval_crisp(1.0, t=[1.0, 0.3], alpha=0.0) == pytest.approx(2.0 + 3.5)


def test_nonfinite_evaluation_is_reported():
    with pytest.raises(NonFiniteValue):
        eval_tree(parse("ln(x)"), -1.0)
    with pytest.raises(NonFiniteValue):
        eval_tree(parse("1/x"), 0.0)


# -- symbolic derivative -------------------------------------------------------


@pytest.mark.parametrize("src,x", [
    ("cos(x) - x^2/32", 1.3),
    ("x*exp(-x)", 0.7),
    ("ln(x + 3) / (x + 1)", 0.4),
    ("sin(2*x)^3", -0.9),
])
def test_derivative_matches_finite_differences(src, x):
    d = differentiate(parse(src))
    h = 1e-6
    f = lambda v: eval_tree(parse(src), v)
    want = (f(x + h) - f(x - h)) / (2 * h)
    assert eval_tree(d, x) == pytest.approx(want, abs=1e-7)


def test_derivative_of_bound_expression_keeps_bindings():
    b = bind("C*sin(x)", {"C": FuzzyNumber.triangular(1, 2, 3)})
    d = b.derivative("x")
    assert d.arity == 1
    assert d.eval_crisp(0.0, t=[1.0], alpha=0.0) == pytest.approx(3.0)


# -- affinity probes -----------------------------------------------------------


def test_single_occurrence_outside_calls_is_affine():
    b = bind("C*x + 1", {"C": FuzzyNumber.triangular(0, 1, 2)})
    assert is_affine_in_slot(b, 0)


def test_squared_occurrence_is_not_affine():
    b = bind("C*C*x + 1", {"C": FuzzyNumber.triangular(0, 1, 2)})
    assert not is_affine_in_slot(b, 0)


def test_occurrence_inside_a_call_is_not_affine():
    b = bind("sin(C*x)", {"C": FuzzyNumber.triangular(0, 1, 2)})
    assert not is_affine_in_slot(b, 0)


def test_mixed_slots_are_probed_independently():
    b = bind("A*x + exp(B)", {"A": FuzzyNumber.triangular(0, 1, 2),
                              "B": FuzzyNumber.triangular(0, 1, 2)})
    assert is_affine_in_slot(b, 0)
    assert not is_affine_in_slot(b, 1)


def test_affinity_in_y():
    c1 = {"C1": FuzzyNumber.triangular(-2, 1, 4)}
    assert is_affine_in_y(bind("-Y + C1*cos(x)", c1))
    assert not is_affine_in_y(bind("Y*Y + C1", c1))
    assert not is_affine_in_y(bind("Y^2 + C1", c1))
