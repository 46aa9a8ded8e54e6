"""
Initial value problems through the Volterra conversion.

With u = d^n y and data d^i y(a) = c_i,

    u(x) + integral over [a, x] of K(x, z) u(z) dz = g(x) + S(x),   K = -h

and every derivative of y follows from u:

    d^k y(x) = sum_{i>=k} c_i (x-a)^(i-k)/(i-k)!
               + integral over [a, x] of (x-z)^(n-k-1)/(n-k-1)! u(z) dz
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import factorial
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from config.config import Config
from core.exceptions import InvalidArgumentError
from core.greens import CausalGreens, apply_greens
from core.grid import (GridFunction, GridSpec, _require_same_grid, cumulative_integral,
                       kernel_apply, polynomial_kernel)
from core.operator import DifferentialOperator, InitialConditions, reflect_operator, sample_all
from core.volterra import build_h, resolvent_series, solve_volterra2

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IVPSolution:
    """Solution samples y, the auxiliary u = d^n y and d^k y for k < n"""

    y: GridFunction
    u: GridFunction
    derivatives: Tuple[GridFunction, ...]

    @property
    def grid(self) -> GridSpec:
        return self.y.grid


def _anchor_side(ic: InitialConditions, grid: GridSpec) -> str:
    tol = 1e-12 * max(1.0, abs(grid.a), abs(grid.b))
    if abs(ic.anchor - grid.a) <= tol:
        return 'a'
    if abs(ic.anchor - grid.b) <= tol:
        return 'b'
    raise InvalidArgumentError(
        f"initial data anchor {ic.anchor} is neither endpoint of [{grid.a}, {grid.b}]")


def _check_degree(op: DifferentialOperator, ic: InitialConditions) -> None:
    if len(ic) != op.degree:
        raise InvalidArgumentError(
            f"expected {op.degree} initial values for a degree-{op.degree} operator, got {len(ic)}")


def _require_left_anchor(ic: InitialConditions, grid: GridSpec) -> None:
    if _anchor_side(ic, grid) != 'a':
        raise InvalidArgumentError(f"initial data must be anchored at a={grid.a}, got {ic.anchor}")


def build_S(op: DifferentialOperator, ic: InitialConditions, grid: GridSpec) -> GridFunction:
    """S(x) = -sum_i sum_{k<=i} c_i P_k(x) (x-a)^(i-k)/(i-k)!"""
    _check_degree(op, ic)
    _require_left_anchor(ic, grid)
    offset = grid.nodes - grid.a
    S = np.zeros(grid.size)
    if not any(ic.values):
        return GridFunction(grid, S)
    coeffs = sample_all(op, grid)
    for i, c in enumerate(ic.values):
        if c == 0.0:
            continue
        for k in range(i + 1):
            S -= c * coeffs[k] * offset ** (i - k) / factorial(i - k)
    return GridFunction(grid, S)


def build_D(ic: InitialConditions, grid: GridSpec) -> GridFunction:
    """D(x) = sum_i c_i (x-a)^i / i!"""
    _require_left_anchor(ic, grid)
    offset = grid.nodes - grid.a
    D = np.zeros(grid.size)
    for i, c in enumerate(ic.values):
        D += c * offset ** i / factorial(i)
    return GridFunction(grid, D)


def derivative_stack(values: Tuple[float, ...], u: GridFunction, degree: int) -> Tuple[GridFunction, ...]:
    """d^k y for k = 0..n-1 from the initial data and u = d^n y"""
    grid = u.grid
    offset = grid.nodes - grid.a
    stack = []
    for k in range(degree):
        head = np.zeros(grid.size)
        for i in range(k, degree):
            head += values[i] * offset ** (i - k) / factorial(i - k)
        tail = kernel_apply(polynomial_kernel(grid, degree - k - 1), u)
        stack.append(tail + head)
    return tuple(stack)


def _reflect_function(f: GridFunction, sign: float = 1.0) -> GridFunction:
    return GridFunction(f.grid, sign * f.values[::-1])


def solve_ivp(op: DifferentialOperator, g: GridFunction, ic: InitialConditions,
              tol: Optional[float] = None, max_terms: Optional[int] = None,
              method: str = 'direct') -> IVPSolution:
    """Solve O y = g with d^i y(anchor) = c_i; the anchor is either endpoint.

    method='direct' marches the second-kind equation forward, 'series' uses
    u = f + R f with the resolvent series of h.
    """
    grid = g.grid
    _check_degree(op, ic)
    if method not in ('direct', 'series'):
        raise InvalidArgumentError(f"unknown solve method '{method}'")

    if _anchor_side(ic, grid) == 'b':
        n = op.degree
        logger.info(f"Initial data at b={grid.b}; solving the reflected problem")
        reflected_ic = InitialConditions(tuple((-1.0) ** k * c for k, c in enumerate(ic.values)), grid.a)
        forward = solve_ivp(reflect_operator(op, grid), _reflect_function(g, (-1.0) ** n),
                            reflected_ic, tol, max_terms, method)
        derivatives = tuple(_reflect_function(d, (-1.0) ** k) for k, d in enumerate(forward.derivatives))
        return IVPSolution(y=derivatives[0], u=_reflect_function(forward.u, (-1.0) ** n),
                           derivatives=derivatives)

    h = build_h(op, grid)
    rhs = g + build_S(op, ic, grid)
    if method == 'series':
        result = resolvent_series(h, tol, max_terms)
        u = rhs + kernel_apply(result.R, rhs)
    else:
        u = solve_volterra2(-h, rhs)

    derivatives = derivative_stack(ic.values, u, op.degree)
    logger.info(f"IVP solved on {grid.size} nodes, sup|y| = {derivatives[0].sup_norm():.6g}")
    return IVPSolution(y=derivatives[0], u=u, derivatives=derivatives)


def homogeneous_solution(op: DifferentialOperator, ic: InitialConditions, G: CausalGreens) -> GridFunction:
    """u(x) = D(x) + integral over [a, x] of T(x, z) S(z) dz"""
    _check_degree(op, ic)
    grid = G.grid
    if _anchor_side(ic, grid) == 'b':
        # G is causal from a, so data at b goes through the reflected solve
        return solve_ivp(op, GridFunction.constant(grid, 0.0), ic).y
    return build_D(ic, grid) + kernel_apply(G.T, build_S(op, ic, grid))


def complete_solution(op: DifferentialOperator, g: GridFunction, ic: InitialConditions,
                      G: CausalGreens) -> GridFunction:
    """Homogeneous part carrying the data plus the causal particular solution"""
    _require_same_grid(G.grid, g.grid)
    return homogeneous_solution(op, ic, G) + apply_greens(G, g)


@dataclass(frozen=True, eq=False)
class FundamentalSystem:
    """u_r with d^i u_r(a) = delta_ri; ``derivatives[r, i]`` holds d^i u_r"""

    grid: GridSpec
    functions: Tuple[GridFunction, ...]
    derivatives: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.functions)

    def matrix_at(self, index: int) -> np.ndarray:
        """Wronski matrix M[i, r] = d^i u_r at one node"""
        return self.derivatives[:, :, index].T


def fundamental_solutions(op: DifferentialOperator, G: CausalGreens) -> FundamentalSystem:
    """The n solutions with unit initial data, each with its derivative stack"""
    grid = G.grid
    n = op.degree
    h = None
    functions: List[GridFunction] = []
    stacks = np.zeros((n, n, grid.size))
    for r in range(n):
        ic = InitialConditions.unit(n, r, grid.a)
        S = build_S(op, ic, grid)
        if G.R is not None:
            mu = S + kernel_apply(G.R, S)
        else:
            h = build_h(op, grid) if h is None else h
            mu = solve_volterra2(-h, S)
        stack = derivative_stack(ic.values, mu, n)
        for i, d in enumerate(stack):
            stacks[r, i] = d.values
        functions.append(build_D(ic, grid) + kernel_apply(G.T, S))
    logger.info(f"Built {n} fundamental solutions")
    return FundamentalSystem(grid=grid, functions=tuple(functions), derivatives=stacks)


def _lu_determinant(matrix: np.ndarray) -> float:
    lu, piv = lu_factor(matrix, check_finite=True)
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    return float((-1.0) ** swaps * np.prod(np.diag(lu)))


def wronskian(system: FundamentalSystem, at_index: int) -> float:
    """det [d^i u_r] at one node, by LU with partial pivoting"""
    if not 0 <= at_index < system.grid.size:
        raise InvalidArgumentError(f"node index {at_index} outside the grid")
    return _lu_determinant(system.matrix_at(at_index))


def wronskian_series(system: FundamentalSystem) -> GridFunction:
    return GridFunction(system.grid, [wronskian(system, i) for i in range(system.grid.size)])


def abel_wronskian(op: DifferentialOperator, grid: GridSpec) -> GridFunction:
    """exp(-integral over [a, x] of P_{n-1})"""
    top = GridFunction(grid, sample_all(op, grid)[op.degree - 1])
    return GridFunction(grid, np.exp(-cumulative_integral(top, 0).values))


@dataclass(frozen=True)
class VopReport:
    """Deviation of sum_r W_r(y) u_r(x) / W(y) from T(x, y)"""

    max_deviation: float
    checked_pairs: int
    skipped_columns: Tuple[int, ...]


def vop_greens_check(op: DifferentialOperator, G: CausalGreens,
                     system: Optional[FundamentalSystem] = None) -> VopReport:
    """Compare T with the variation-of-parameters kernel on every pair x >= y.

    The Cramer ratios W_r / W are the solution c of M(y) c = e_{n-1}.
    Columns whose Wronskian is below the skip ratio are reported, not used.
    """
    system = fundamental_solutions(op, G) if system is None else system
    grid = G.grid
    n = op.degree
    ratio = Config.IVP_CONFIG['wronskian_skip_ratio']
    values = np.vstack([f.values for f in system.functions])
    unit = np.zeros(n)
    unit[-1] = 1.0

    determinants = np.array([wronskian(system, j) for j in range(grid.size)])
    scale = max(1.0, float(np.max(np.abs(determinants))))
    skipped = []
    worst = 0.0
    checked = 0
    for j in range(grid.size):
        if abs(determinants[j]) < ratio * scale:
            skipped.append(j)
            continue
        weights = lu_solve(lu_factor(system.matrix_at(j)), unit)
        kernel = weights @ values[:, j:]
        deviation = float(np.max(np.abs(kernel - G.T.samples[j:, j])))
        worst = max(worst, deviation)
        checked += grid.size - j

    if skipped:
        logger.warning(f"Skipped {len(skipped)} columns with near-zero Wronskian: {skipped[:10]}")
    logger.info(f"Variation-of-parameters deviation {worst:.3e} over {checked} pairs")
    return VopReport(max_deviation=worst, checked_pairs=checked, skipped_columns=tuple(skipped))
