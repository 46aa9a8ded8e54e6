"""
Randomized invariants over operators with polynomial coefficients
"""

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from core.bvp import sturm_liouville_greens
from core.greens import build_greens, greens_eval
from core.grid import GridFunction, make_grid
from core.ivp import solve_ivp
from core.operator import DifferentialOperator, InitialConditions
from services.acceptance_service import AcceptanceService


def random_polynomial(rng):
    return Polynomial(rng.uniform(-2.0, 2.0, size=rng.integers(1, 4)))


@pytest.fixture(scope="module")
def grid():
    return make_grid(0.0, 1.0, 128)


class TestRandomOperators:

    def test_causality(self, grid, rng):
        for _ in range(5):
            op = DifferentialOperator((random_polynomial(rng), random_polynomial(rng)))
            G = build_greens(op, grid, max_terms=200)
            assert np.all(np.triu(G.T.samples, 1) == 0.0)
            assert greens_eval(G, 3, 40) == 0.0

    def test_superposition(self, grid, rng):
        for _ in range(5):
            op = DifferentialOperator((random_polynomial(rng), random_polynomial(rng)))
            g1 = GridFunction.from_callable(grid, random_polynomial(rng))
            g2 = GridFunction.from_callable(grid, random_polynomial(rng))
            c1 = tuple(rng.uniform(-2.0, 2.0, 2))
            c2 = tuple(rng.uniform(-2.0, 2.0, 2))
            together = solve_ivp(op, g1 + g2, InitialConditions(tuple(np.add(c1, c2)), grid.a)).y
            apart = (solve_ivp(op, g1, InitialConditions(c1, grid.a)).y
                     + solve_ivp(op, g2, InitialConditions(c2, grid.a)).y)
            np.testing.assert_allclose(together.values, apart.values, atol=1e-10)

    def test_dirichlet_symmetry_and_wronskian(self, grid, rng):
        for _ in range(3):
            slg = sturm_liouville_greens(random_polynomial(rng), grid.a, grid.b, grid.n_intervals,
                                         max_terms=200)
            scale = np.max(np.abs(slg.G))
            assert np.max(np.abs(slg.G - slg.G.T)) / scale <= 1e-9
            w = slg.wronskian().values
            assert np.max(w) - np.min(w) <= 1e-7


def test_property_suite_rows_pass():
    rows = AcceptanceService().property_suite(cases=10, seed=7, n_intervals=128)
    assert [row[0] for row in rows] == ['11.superposition', '11.causality', '11.wronskian', '11.symmetry']
    for check_id, _, measured, threshold, passed in rows:
        assert passed, f"{check_id}: {measured} > {threshold}"
