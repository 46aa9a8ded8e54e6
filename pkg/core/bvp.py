"""
Dirichlet Green's function for (d^2 - P) y = g, y(a) = y(b) = 0.

u1 and u2 are the causal kernels T(x, a) and T(x, b) of d^2 - P; the
second is built on the reflected grid so every solve marches forward.

    G(x, y) = u1(min) u2(max) / w,   w = -T(a, b)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from config.config import Config
from core.exceptions import ResonanceError
from core.greens import build_greens
from core.grid import GridFunction, GridSpec, _require_same_grid, cumulative_integral, make_grid
from core.operator import DifferentialOperator, reflect_operator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SturmLiouvilleGreens:
    grid: GridSpec
    u1: GridFunction
    u2: GridFunction
    du1: GridFunction
    du2: GridFunction
    w_const: float
    G: np.ndarray

    def wronskian(self) -> GridFunction:
        """u1 u2' - u1' u2 per node; constant up to quadrature error"""
        return self.u1 * self.du2 - self.du1 * self.u2


def dirichlet_operator(P: Callable[[float], float]) -> DifferentialOperator:
    def zeroth(x: float) -> float:
        return -P(x)

    def first(x: float) -> float:
        return 0.0

    return DifferentialOperator((zeroth, first), ('-P', '0'))


def _anchored_pair(op: DifferentialOperator, grid: GridSpec, tol: Optional[float],
                   max_terms: Optional[int]):
    """(u1, du1, u2, du2) as plain arrays"""
    forward = build_greens(op, grid, tol, max_terms)
    reflected = build_greens(reflect_operator(op, grid), grid, tol, max_terms)
    u1 = forward.T.samples[:, 0]
    du1 = forward.derivatives[1].samples[:, 0]
    u2 = -reflected.T.samples[::-1, 0]
    du2 = reflected.derivatives[1].samples[::-1, 0]
    return u1, du1, u2, du2


def _reflected_endpoint_value(op: DifferentialOperator, grid: GridSpec, tol: Optional[float],
                              max_terms: Optional[int]) -> float:
    """w = -u2(a) computed on the given grid"""
    reflected = build_greens(reflect_operator(op, grid), grid, tol, max_terms)
    return float(reflected.T.samples[grid.n_intervals, 0])


def sturm_liouville_greens(P: Callable[[float], float], a: float, b: float, n_intervals: int,
                           tol: Optional[float] = None,
                           max_terms: Optional[int] = None) -> SturmLiouvilleGreens:
    """Dirichlet Green's function on [a, b]; raises ResonanceError when none exists"""
    cfg = Config.BVP_CONFIG
    grid = make_grid(a, b, n_intervals)
    op = dirichlet_operator(P)
    u1, du1, u2, du2 = _anchored_pair(op, grid, tol, max_terms)
    w_const = float(-u2[0])

    scale = max(1.0, float(np.max(np.abs(u1))), float(np.max(np.abs(u2))))
    threshold = cfg['resonance_ratio'] * scale
    half = grid.n_intervals // 2
    if half >= 2 and half % 2 == 0:
        coarse = _reflected_endpoint_value(op, make_grid(a, b, half), tol, max_terms)
        threshold = max(threshold, cfg['resonance_refinement_factor'] * abs(w_const - coarse))
    logger.info(f"Sturm-Liouville w_const = {w_const:.12g} (resonance threshold {threshold:.3e})")
    if abs(w_const) < threshold:
        raise ResonanceError(
            f"resonant interval [{a}, {b}]: |w_const| = {abs(w_const):.3e} below {threshold:.3e}",
            w_const=w_const, threshold=threshold)

    lower = np.tril(np.ones((grid.size, grid.size), dtype=bool), -1)
    upper_form = np.outer(u1, u2) / w_const
    G = np.where(lower, upper_form.T, upper_form)

    return SturmLiouvilleGreens(
        grid=grid,
        u1=GridFunction(grid, u1),
        u2=GridFunction(grid, u2),
        du1=GridFunction(grid, du1),
        du2=GridFunction(grid, du2),
        w_const=w_const,
        G=G,
    )


def solve_bvp(slg: SturmLiouvilleGreens, g: GridFunction) -> GridFunction:
    """y = (u2 * integral_a^x u1 g + u1 * integral_x^b u2 g) / w"""
    _require_same_grid(slg.grid, g.grid)
    left = cumulative_integral(slg.u1 * g, 0).values
    right = cumulative_integral(slg.u2 * g, slg.grid.n_intervals).values
    y = (slg.u2.values * left - slg.u1.values * right) / slg.w_const
    return GridFunction(slg.grid, y)
