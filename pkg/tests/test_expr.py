from fractions import Fraction as F

import pytest

from crnelim.expr import ExprEvaluationError, ExprSyntaxError, normalize_text, parse_expr

NAMES = {"A": 0, "U": 1}


@pytest.mark.parametrize(
    "text,x,value",
    [
        ("2*A + 1", (3, 0), 7),
        ("A^2 - U", (3, 4), 5),
        ("(A+1)!", (3, 0), 24),
        ("fact(A) / 2", (4, 0), 12),
        ("ind(A >= 1, U == 0)", (1, 0), 1),
        ("ind(A >= 1, U == 0)", (1, 1), 0),
        ("-A + 5", (2, 0), 3),
        ("1.5 * A", (2, 0), 3),
        ("2^3^2", (0, 0), 512),
    ],
)
def test_evaluation(text, x, value):
    assert parse_expr(text, NAMES).eval(x) == F(value)


def test_exact_division():
    assert parse_expr("A / 3", NAMES).eval((1, 0)) == F(1, 3)


@pytest.mark.parametrize("text", ["A +", "B * 2", "foo(A)", "ind(A)", "(A", "A $ 2"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text, NAMES)


def test_unknown_species_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("A + B", NAMES)
    assert info.value.col == 4
    assert "unknown species 'B'" in str(info.value)


@pytest.mark.parametrize("text,x", [("1 / (A - 1)", (1, 0)), ("A ^ (0 - 1)", (2, 0)), ("(A - 3)!", (1, 0))])
def test_evaluation_errors(text, x):
    with pytest.raises(ExprEvaluationError):
        parse_expr(text, NAMES).eval(x)


def test_normalize_text():
    assert normalize_text("  A  *\t2 ") == "A * 2"
