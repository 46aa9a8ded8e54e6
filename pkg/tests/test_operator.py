"""
Tests for differential operators, coefficient sampling and reflection
"""

import math

import numpy as np
import pytest

from core.exceptions import CoefficientError, ExpressionDomainError, InvalidArgumentError
from core.grid import make_grid
from core.operator import (DifferentialOperator, InitialConditions, reflect_operator,
                           sample_all, sample_coeff)
from utils.expression_parser import parse


class TestDifferentialOperator:

    def test_degree_and_labels(self):
        op = DifferentialOperator((lambda x: x, lambda x: 1.0))
        assert op.degree == 2
        assert op.labels == ('P0', 'P1')

    def test_describe(self):
        op = DifferentialOperator.from_constants([-1.0, 0.0])
        assert op.describe() == 'd^2 + (0.0)*d^1 + (-1.0)*d^0'

    def test_pure_derivative_has_zero_coefficients(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator.pure_derivative(3)
        assert op.degree == 3
        assert np.all(sample_all(op, grid) == 0.0)

    def test_rejects_empty(self):
        with pytest.raises(InvalidArgumentError):
            DifferentialOperator(())

    def test_rejects_non_callable(self):
        with pytest.raises(InvalidArgumentError):
            DifferentialOperator((1.0,))


class TestSampling:

    def test_samples_on_nodes(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator((lambda x: x * x, math.cos))
        np.testing.assert_allclose(sample_coeff(op, 0, grid).values, grid.nodes ** 2)
        np.testing.assert_allclose(sample_all(op, grid)[1], np.cos(grid.nodes))

    def test_division_by_zero_names_the_node(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator((lambda x: 1.0 / x,))
        with pytest.raises(CoefficientError) as exc_info:
            sample_coeff(op, 0, grid)
        assert exc_info.value.node == 0
        assert exc_info.value.k == 0

    def test_non_finite_value(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator((lambda x: float('inf') if x > 0.6 else 0.0,))
        with pytest.raises(CoefficientError) as exc_info:
            sample_coeff(op, 0, grid)
        assert exc_info.value.node == 3

    def test_expression_domain_error_reports_node(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator((parse('1/x'),))
        with pytest.raises(CoefficientError) as exc_info:
            sample_coeff(op, 0, grid)
        assert exc_info.value.node == 0
        assert exc_info.value.x == 0.0
        assert exc_info.value.k == 0
        assert isinstance(exc_info.value.__cause__, ExpressionDomainError)
        line = exc_info.value.one_line()
        assert line.startswith("non_finite_coefficient: ")
        assert "x=0.0" in line
        assert "(1.0 / x)" in line

    def test_index_out_of_range(self):
        grid = make_grid(0.0, 1.0, 4)
        with pytest.raises(InvalidArgumentError):
            sample_coeff(DifferentialOperator.from_constants([1.0]), 1, grid)


class TestReflection:

    def test_reflected_coefficients(self):
        grid = make_grid(0.0, 1.0, 4)
        op = DifferentialOperator((lambda x: x, lambda x: 2.0))
        reflected = reflect_operator(op, grid)
        assert reflected.coeffs[0](0.25) == pytest.approx(0.75)
        assert reflected.coeffs[1](0.25) == pytest.approx(-2.0)
        assert reflected.labels[0].startswith('reflected')

    def test_reflecting_twice_restores(self):
        grid = make_grid(-1.0, 3.0, 8)
        op = DifferentialOperator((math.sin, math.exp, lambda x: x ** 3))
        twice = reflect_operator(reflect_operator(op, grid), grid)
        np.testing.assert_allclose(sample_all(twice, grid), sample_all(op, grid), atol=1e-14)


class TestInitialConditions:

    def test_unit_data(self):
        ic = InitialConditions.unit(3, 1, 0.0)
        assert ic.values == (0.0, 1.0, 0.0)
        assert len(ic) == 3

    def test_zeros(self):
        assert InitialConditions.zeros(2, 1.0).values == (0.0, 0.0)
