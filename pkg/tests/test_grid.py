"""
Tests for grids, grid functions, triangular kernels and the quadrature rules
"""

import numpy as np
import pytest

from core.exceptions import GridError, GridMismatchError, NonFiniteValueError
from core.grid import (GridFunction, GridSpec, TriangularKernel, cumulative_integral,
                       kernel_apply, kernel_compose, make_grid, polynomial_kernel)


class TestGridSpec:

    def test_nodes_and_step(self):
        grid = make_grid(0.0, 2.0, 8)
        assert grid.size == 9
        assert grid.step == pytest.approx(0.25)
        assert grid.nodes[0] == 0.0
        assert grid.nodes[-1] == 2.0

    @pytest.mark.parametrize("a,b,n", [
        (0.0, 1.0, 7),
        (0.0, 1.0, 0),
        (1.0, 1.0, 4),
        (2.0, 1.0, 4),
        (0.0, float('inf'), 4),
        (0.0, 1.0, 2.5),
    ])
    def test_rejects_invalid_grids(self, a, b, n):
        with pytest.raises(GridError):
            GridSpec(a, b, n)

    def test_rejects_bool_interval_count(self):
        with pytest.raises(GridError):
            GridSpec(0.0, 1.0, True)

    def test_index_of_node(self):
        grid = make_grid(0.0, 1.0, 10)
        assert grid.index_of(0.3) == 3
        assert grid.index_of(1.0) == 10

    def test_index_of_off_grid_point(self):
        grid = make_grid(0.0, 1.0, 10)
        with pytest.raises(GridError):
            grid.index_of(0.35)
        with pytest.raises(GridError):
            grid.index_of(1.5)

    def test_grids_compare_by_value(self):
        assert make_grid(0, 1, 4) == GridSpec(0.0, 1.0, 4)

    def test_span_weights_integrate_cubics_exactly(self):
        grid = make_grid(0.0, 1.0, 12)
        f = grid.nodes ** 3
        for m in range(2, grid.size):
            approx = grid.span_weights[m, :m + 1] @ f[m::-1]
            assert approx == pytest.approx(grid.nodes[m] ** 4 / 4.0, abs=1e-14)


class TestCumulativeIntegral:

    def test_forward_quadratic_is_exact(self):
        grid = make_grid(0.0, 1.0, 10)
        F = cumulative_integral(GridFunction(grid, grid.nodes ** 2), 0)
        np.testing.assert_allclose(F.values, grid.nodes ** 3 / 3.0, atol=1e-14)

    def test_backward_from_right_end(self):
        grid = make_grid(0.0, 1.0, 8)
        F = cumulative_integral(GridFunction(grid, grid.nodes ** 2), 8)
        np.testing.assert_allclose(F.values, (grid.nodes ** 3 - 1.0) / 3.0, atol=1e-14)

    def test_from_interior_node(self):
        grid = make_grid(0.0, 1.0, 10)
        F = cumulative_integral(GridFunction(grid, grid.nodes ** 2), 4)
        expected = (grid.nodes ** 3 - grid.nodes[4] ** 3) / 3.0
        np.testing.assert_allclose(F.values, expected, atol=1e-14)
        assert F.values[4] == 0.0

    def test_cubic_exact_beyond_first_panel(self):
        grid = make_grid(0.0, 1.0, 10)
        F = cumulative_integral(GridFunction(grid, grid.nodes ** 3), 0)
        np.testing.assert_allclose(F.values[2:], grid.nodes[2:] ** 4 / 4.0, atol=1e-14)

    def test_rejects_out_of_range_start(self):
        grid = make_grid(0.0, 1.0, 4)
        with pytest.raises(GridError):
            cumulative_integral(GridFunction.constant(grid, 1.0), 5)

    def test_linear_in_the_integrand(self):
        grid = make_grid(0.0, 1.0, 16)
        f = GridFunction(grid, np.exp(grid.nodes))
        g = GridFunction(grid, np.sin(3.0 * grid.nodes))
        combined = GridFunction(grid, 2.5 * f.values - 1.5 * g.values)
        for start in (0, 7, 16):
            expected = 2.5 * cumulative_integral(f, start).values - 1.5 * cumulative_integral(g, start).values
            np.testing.assert_allclose(cumulative_integral(combined, start).values, expected,
                                       rtol=1e-12, atol=1e-15)

    def test_swapping_endpoints_flips_sign(self):
        grid = make_grid(0.0, 1.0, 16)
        f = GridFunction(grid, np.exp(grid.nodes))
        # table[j, i] is the integral from x_j to x_i
        table = np.array([cumulative_integral(f, j).values for j in range(grid.size)])
        np.testing.assert_allclose(table, -table.T, atol=1e-14)

    def test_exponential(self):
        grid = make_grid(0.0, 1.0, 64)
        F = cumulative_integral(GridFunction(grid, np.exp(grid.nodes)), 0)
        assert abs(F.values[-1] - (np.e - 1.0)) < 1e-8

    def test_observed_order_on_exponential(self):
        errors = []
        for n in (8, 16, 32):
            grid = make_grid(0.0, 1.0, n)
            F = cumulative_integral(GridFunction(grid, np.exp(grid.nodes)), 0)
            errors.append(abs(F.values[-1] - (np.e - 1.0)))
        ratios = np.array(errors[:-1]) / np.array(errors[1:])
        assert np.all(ratios >= 8.0), ratios


class TestGridFunction:

    def test_values_are_read_only(self):
        grid = make_grid(0.0, 1.0, 4)
        f = GridFunction.constant(grid, 2.0)
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_rejects_non_finite(self):
        grid = make_grid(0.0, 1.0, 4)
        with pytest.raises(NonFiniteValueError):
            GridFunction(grid, [0.0, 1.0, np.nan, 0.0, 0.0])

    def test_rejects_wrong_length(self):
        grid = make_grid(0.0, 1.0, 4)
        with pytest.raises(GridError):
            GridFunction(grid, [0.0, 1.0])

    def test_arithmetic_requires_same_grid(self):
        f = GridFunction.constant(make_grid(0.0, 1.0, 4), 1.0)
        g = GridFunction.constant(make_grid(0.0, 2.0, 4), 1.0)
        with pytest.raises(GridMismatchError):
            f + g

    def test_complex_kind(self):
        grid = make_grid(0.0, 1.0, 4)
        f = GridFunction.constant(grid, 1.0 + 2.0j)
        assert f.kind == 'complex'
        assert f.real().kind == 'real'


class TestTriangularKernel:

    def test_upper_triangle_is_zero(self):
        grid = make_grid(0.0, 1.0, 4)
        K = TriangularKernel(grid, np.ones((5, 5)))
        assert K[1, 3] == 0.0
        assert K[3, 1] == 1.0
        assert np.all(np.triu(K.samples, 1) == 0.0)

    def test_from_function_samples_lower_triangle(self):
        grid = make_grid(0.0, 1.0, 4)
        K = TriangularKernel.from_function(grid, lambda x, y: x - y)
        np.testing.assert_allclose(K.samples, polynomial_kernel(grid, 1).samples)

    def test_rejects_wrong_shape(self):
        grid = make_grid(0.0, 1.0, 4)
        with pytest.raises(GridError):
            TriangularKernel(grid, np.ones((4, 4)))

    def test_compose_constants_gives_distance(self):
        grid = make_grid(0.0, 1.0, 16)
        ones = TriangularKernel.from_function(grid, lambda x, y: np.ones_like(x))
        composed = kernel_compose(ones, ones)
        np.testing.assert_allclose(composed.samples, polynomial_kernel(grid, 1).samples, atol=1e-14)

    def test_compose_raises_polynomial_degree(self):
        grid = make_grid(0.0, 1.0, 16)
        composed = kernel_compose(polynomial_kernel(grid, 1), polynomial_kernel(grid, 0))
        np.testing.assert_allclose(composed.samples, polynomial_kernel(grid, 2).samples, atol=1e-14)

    def test_compose_of_linear_kernels(self):
        grid = make_grid(0.0, 1.0, 64)
        linear = polynomial_kernel(grid, 1)
        composed = kernel_compose(linear, linear)
        np.testing.assert_allclose(composed.samples, polynomial_kernel(grid, 3).samples, atol=1e-10)

    def test_compose_is_bilinear(self):
        grid = make_grid(0.0, 1.0, 32)
        A = TriangularKernel.from_function(grid, lambda x, y: np.exp(x - y))
        B = TriangularKernel.from_function(grid, lambda x, y: np.cos(x * y))
        C = TriangularKernel.from_function(grid, lambda x, y: x + y ** 2)
        mixed = TriangularKernel(grid, 2.0 * A.samples - 0.5 * B.samples)
        expected = 2.0 * kernel_compose(A, C).samples - 0.5 * kernel_compose(B, C).samples
        np.testing.assert_allclose(kernel_compose(mixed, C).samples, expected, rtol=1e-12, atol=1e-14)
        expected = 2.0 * kernel_compose(C, A).samples - 0.5 * kernel_compose(C, B).samples
        np.testing.assert_allclose(kernel_compose(C, mixed).samples, expected, rtol=1e-12, atol=1e-14)

    def test_compose_is_associative_to_quadrature_error(self):
        grid = make_grid(0.0, 1.0, 64)
        slow = TriangularKernel.from_function(grid, lambda x, y: np.exp(x - y))
        fast = TriangularKernel.from_function(grid, lambda x, y: np.exp(2.0 * (x - y)))
        pair = TriangularKernel.from_function(grid, lambda x, y: np.exp(2.0 * (x - y)) - np.exp(x - y))
        single = max(np.max(np.abs(kernel_compose(slow, fast).samples - pair.samples)),
                     np.max(np.abs(kernel_compose(fast, slow).samples - pair.samples)))
        left = kernel_compose(slow, kernel_compose(fast, slow))
        right = kernel_compose(kernel_compose(slow, fast), slow)
        gap = np.max(np.abs(left.samples - right.samples))
        assert single > 0.0
        assert gap <= 10.0 * single

    def test_compose_requires_same_grid(self):
        first = polynomial_kernel(make_grid(0.0, 1.0, 4), 0)
        second = polynomial_kernel(make_grid(0.0, 1.0, 6), 0)
        with pytest.raises(GridMismatchError):
            kernel_compose(first, second)

    def test_apply_constant_kernel(self):
        grid = make_grid(1.0, 2.0, 10)
        y = kernel_apply(polynomial_kernel(grid, 0), GridFunction.constant(grid, 1.0))
        np.testing.assert_allclose(y.values, grid.nodes - 1.0, atol=1e-14)
