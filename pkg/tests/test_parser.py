"""Tests for the expression grammar and printer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noether_verify.algebra.bundle import CoordId
from noether_verify.algebra.expr import Expr, JetVariable
from noether_verify.algebra.indices import SymMultiIndex
from noether_verify.algebra.parser import (
    ExpressionParser,
    format_coordinate,
    format_expr,
    format_variable,
    parse_expr,
)
from noether_verify.algebra.random_expr import ExprProfile, random_expr
from noether_verify.errors import ExpressionSyntaxError, IndexRangeError, UnknownFamilyError


def test_parse_and_print(line_spec):
    expr = parse_expr(line_spec, "3/2*y[;(0,0)]^2 - x[0]")
    y00 = Expr.coordinate(line_spec, "y", (), (0, 0))
    x = Expr.coordinate(line_spec, "x", (0,))
    assert expr == (y00 ** 2).scale(Fraction(3, 2)) - x
    assert format_expr(expr) == "-1*x[0] + 3/2*y[;(0,0)]^2"


def test_print_special_cases(line_spec):
    assert format_expr(Expr.zero(line_spec)) == "0"
    assert format_expr(parse_expr(line_spec, "y*y")) == "1*y^2"
    assert format_expr(parse_expr(line_spec, "-y[;(0,0)]")) == "-1*y[;(0,0)]"
    assert format_expr(parse_expr(line_spec, "7")) == "7"


def test_print_truncated(line_spec):
    expr = parse_expr(line_spec, "y + y^2 + y^3")
    assert format_expr(expr, max_terms=2) == "1*y + 1*y^2 + ... (3 terms total)"


def test_antisymmetric_sign(antisym_spec):
    assert parse_expr(antisym_spec, "a[2,1]") == -parse_expr(antisym_spec, "a[1,2]")
    assert format_expr(parse_expr(antisym_spec, "a[2,1;(0)]")) == "-1*a[1,2;(0)]"


def test_repeated_antisymmetric_index_warns(antisym_spec):
    result = ExpressionParser(antisym_spec).parse("a[1,1] + a[0,1]")
    assert result.expr == parse_expr(antisym_spec, "a[0,1]")
    assert len(result.warnings) == 1


def test_jet_indices_are_sorted(line_spec, plane_spec):
    assert parse_expr(plane_spec, "u[1;(1,0)]") == parse_expr(plane_spec, "u[1;(0,1)]")


def test_format_variable():
    assert format_variable(JetVariable(CoordId("y", ()), SymMultiIndex((0, 0)))) == "y[;(0,0)]"
    assert format_variable(JetVariable(CoordId("a", (1, 0)), SymMultiIndex((2,)))) == "a[1,0;(2)]"
    assert format_variable(JetVariable(CoordId("y", ()))) == "y"
    assert format_coordinate(CoordId("u", (1,))) == "u[1]"


def test_parse_coordinate(antisym_spec):
    parser = ExpressionParser(antisym_spec)
    assert parser.parse_coordinate("a[2,0]") == (CoordId("a", (0, 2)), -1)
    assert parser.parse_coordinate("a[2,2]") is None
    with pytest.raises(ExpressionSyntaxError):
        parser.parse_coordinate("a[0,1;(0)]")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("y + * y", 1, 5),
        ("y +\n  * y", 2, 3),
        ("y[;(0]", 1, 6),
        ("2/0*y", 1, 3),
        ("y^0", 1, 3),
        ("y $ 1", 1, 3),
    ],
)
def test_syntax_errors_carry_position(line_spec, text, line, column):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expr(line_spec, text)
    assert excinfo.value.line == line
    assert excinfo.value.column == column


def test_unknown_family(line_spec):
    with pytest.raises(UnknownFamilyError, match="column 5"):
        parse_expr(line_spec, "y + z")


@pytest.mark.parametrize("text", ["u[2]", "u", "u[0;(2)]", "x[0;(0)]", "y[0]"])
def test_index_errors(plane_spec, text):
    with pytest.raises(IndexRangeError):
        parse_expr(plane_spec, text)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_print_then_parse(plane_spec, seed):
    profile = ExprProfile(families=("x", "y", "u", "p"), max_jet_order=3, max_degree=3, max_terms=5)
    expr = random_expr(plane_spec, seed, profile)
    assert parse_expr(plane_spec, format_expr(expr)) == expr
