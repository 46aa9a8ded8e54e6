"""
Tests for the coefficient expression parser
"""

import math

import pytest

from core.exceptions import ExpressionDomainError, ExpressionSyntaxError
from utils.expression_parser import (ExpressionParser, parse, parse_function_list,
                                     parse_number_list)


class TestEvaluation:

    @pytest.mark.parametrize("source,x,expected", [
        ("2*x^2+2", 3.0, 20.0),
        ("-2^2", 0.0, -4.0),
        ("2^3^2", 0.0, 512.0),
        ("(1 + x) * (1 - x)", 0.5, 0.75),
        ("x / 4 / 2", 8.0, 1.0),
        ("sin(pi*x)", 0.5, 1.0),
        ("exp(1) - e", 0.0, 0.0),
        ("erf(0)", 0.0, 0.0),
        ("−x", 1.0, -1.0),
        ("1.5e2 + .5", 0.0, 150.5),
        ("abs(-x)", 2.0, 2.0),
    ])
    def test_values(self, source, x, expected):
        assert parse(source)(x) == pytest.approx(expected, abs=1e-15)

    def test_repeated_negation(self):
        assert parse("--x")(2.0) == 2.0

    def test_rendering_parses_back(self):
        expression = parse("-sin(pi*x)^2 + 3*x/(1+x)")
        rendered = expression.to_string()
        again = parse(rendered)
        assert again.to_string() == rendered
        for x in (0.0, 0.3, 1.7):
            assert again(x) == pytest.approx(expression(x), rel=1e-15)

    def test_repr_keeps_source(self):
        assert repr(parse("x+1")) == "Expression('x+1')"


class TestSyntaxErrors:

    @pytest.mark.parametrize("source,position", [
        ("2*", 2),
        ("(x", 2),
        ("foo(x)", 0),
        ("2 $ 3", 2),
        ("2x", 1),
        ("sin x", 4),
        ("", 0),
    ])
    def test_positions(self, source, position):
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse(source)
        assert exc_info.value.position == position
        assert f"at offset {position}" in exc_info.value.one_line()
        assert exc_info.value.one_line().startswith("syntax_error: ")

    def test_parser_is_reusable(self):
        parser = ExpressionParser()
        assert parser.parse("x+1")(1.0) == 2.0
        assert parser.parse("2*x")(1.0) == 2.0


class TestDomainErrors:

    @pytest.mark.parametrize("source,x,fragment", [
        ("log(x)", 0.0, "log(x)"),
        ("1/x", 0.0, "(1.0 / x)"),
        ("sqrt(x)", -1.0, "sqrt(x)"),
        ("x^0.5", -4.0, "(x ^ 0.5)"),
        ("x^-1", 0.0, "(x ^ (-1.0))"),
        ("exp(x)", 1000.0, "exp(x)"),
    ])
    def test_names_the_failing_subexpression(self, source, x, fragment):
        with pytest.raises(ExpressionDomainError) as exc_info:
            parse(source)(x)
        assert exc_info.value.subexpression == fragment
        assert exc_info.value.code == "domain_error"

    def test_integer_power_of_negative_base(self):
        assert parse("x^3")(-2.0) == -8.0


class TestLists:

    def test_function_list(self):
        functions = parse_function_list("x;1;2*x")
        assert [f(2.0) for f in functions] == [2.0, 1.0, 4.0]

    def test_error_offset_is_relative_to_whole_list(self):
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse_function_list("x;2*;1")
        assert exc_info.value.position == 4

    def test_empty_entry(self):
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse_function_list("x;;1")
        assert exc_info.value.position == 2

    def test_number_list(self):
        assert parse_number_list("1, pi/2, -3") == pytest.approx((1.0, math.pi / 2.0, -3.0))
        assert parse_number_list("exp(1)") == pytest.approx((math.e,))

    def test_number_list_rejects_variable(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_number_list("1,x")
