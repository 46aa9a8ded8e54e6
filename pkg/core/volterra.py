"""
Volterra machinery: the kernel h of an operator, its resolvent R (Neumann
series and direct forward substitution) and second-kind solves.

    h(x, y) = -sum_k P_k(x) (x - y)^(n-k-1) / (n-k-1)!
    R = h + integral over [y, x] of h(x, z) R(z, y) dz
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import ceil, factorial
from typing import List, Optional

import numpy as np

from config.config import Config
from core.exceptions import InvalidArgumentError, NonFiniteValueError, SingularPivotError
from core.grid import (GridFunction, GridSpec, TriangularKernel, _compose_samples,
                       _require_same_grid, single_panel_product)
from core.operator import DifferentialOperator, sample_all

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ResolventResult:
    """Outcome of the Neumann series"""

    R: TriangularKernel
    terms_used: int
    last_term_norm: float
    converged: bool
    term_norms: tuple = ()
    monotone_tail: bool = True


def build_h(op: DifferentialOperator, grid: GridSpec) -> TriangularKernel:
    """Sample h(x_i, x_j) for i >= j"""
    n = op.degree
    coeffs = sample_all(op, grid)
    diff = grid.nodes[:, None] - grid.nodes[None, :]
    h = np.zeros((grid.size, grid.size))
    for k in range(n):
        power = n - k - 1
        h -= coeffs[k][:, None] * diff ** power / factorial(power)
    return TriangularKernel(grid, np.tril(h))


def resolvent_series(h: TriangularKernel, tol: Optional[float] = None,
                     max_terms: Optional[int] = None) -> ResolventResult:
    """Sum term_1 = h, term_{r+1} = h o term_r until the newest term drops below tol"""
    tol = Config.RESOLVENT_CONFIG['tol'] if tol is None else tol
    max_terms = Config.RESOLVENT_CONFIG['max_terms'] if max_terms is None else max_terms
    if not tol > 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if isinstance(max_terms, bool) or int(max_terms) != max_terms or max_terms < 1:
        raise InvalidArgumentError(f"max_terms must be a positive integer, got {max_terms}")

    grid = h.grid
    kernel = h.samples
    term = kernel
    total = kernel.copy()
    norm = float(np.max(np.abs(term)))
    norms: List[float] = [norm]
    terms_used = 1

    while norm > tol and terms_used < max_terms:
        term = _compose_samples(kernel, term, grid)
        total += term
        terms_used += 1
        norm = float(np.max(np.abs(term)))
        norms.append(norm)
        logger.debug(f"resolvent term {terms_used}: sup norm {norm:.3e}")
        if not np.isfinite(norm):
            raise NonFiniteValueError(f"resolvent series term {terms_used} overflowed")

    converged = norm <= tol
    crossover = int(ceil(float(np.max(np.abs(kernel))) * (grid.b - grid.a)))
    tail = np.asarray(norms[max(crossover, 1) - 1:])
    monotone_tail = bool(np.all(np.diff(tail) <= 0.0)) if tail.size > 1 else True

    if not monotone_tail:
        logger.warning(f"resolvent series terms are not decaying monotonically after "
                       f"term {crossover}; check the quadrature resolution")
    if converged:
        logger.info(f"Resolvent series converged after {terms_used} terms "
                    f"(last term {norm:.3e})")
    else:
        logger.warning(f"Resolvent series stopped at max_terms={max_terms} "
                       f"with last term {norm:.3e} > tol {tol:.1e}")

    return ResolventResult(
        R=TriangularKernel(grid, total),
        terms_used=terms_used,
        last_term_norm=norm,
        converged=converged,
        term_norms=tuple(norms),
        monotone_tail=monotone_tail,
    )


def _check_pivot(pivot, node: int, floor: float) -> None:
    if np.min(np.abs(pivot)) < floor:
        raise SingularPivotError(f"singular pivot at node {node}", node=node)


def resolvent_direct(h: TriangularKernel, pivot_floor: Optional[float] = None) -> TriangularKernel:
    """Solve the fixed-point equation for R row by row, diagonal weight moved left"""
    floor = Config.RESOLVENT_CONFIG['pivot_floor'] if pivot_floor is None else pivot_floor
    grid = h.grid
    table = grid.span_weights
    step = grid.step
    H = h.samples
    R = np.zeros_like(H)

    for i in range(grid.size):
        R[i, i] = H[i, i]
        if i == 0:
            continue

        a0, a1, b0 = H[i, i - 1], H[i, i], R[i - 1, i - 1]
        pivot = 1.0 - (step / 6.0) * (2.0 * a1 + a0)
        _check_pivot(pivot, i, floor)
        R[i, i - 1] = (a0 + (step / 6.0) * (2.0 * a0 * b0 + a1 * b0)) / pivot

        if i >= 2:
            weights = table[i::-1, i::-1]
            acc = (weights[:i - 1, :i] * R[:i, :i - 1].T) @ H[i, :i]
            pivots = 1.0 - table[i - np.arange(i - 1), 0] * H[i, i]
            _check_pivot(pivots, i, floor)
            R[i, :i - 1] = (H[i, :i - 1] + acc) / pivots

    return TriangularKernel(grid, R)


def solve_volterra2(K: TriangularKernel, rhs: GridFunction,
                    pivot_floor: Optional[float] = None) -> GridFunction:
    """Forward substitution for u(x) + integral over [a, x] of K(x, z) u(z) dz = rhs(x)"""
    _require_same_grid(K.grid, rhs.grid)
    floor = Config.RESOLVENT_CONFIG['pivot_floor'] if pivot_floor is None else pivot_floor
    grid = K.grid
    weights = grid.apply_weights
    step = grid.step
    kernel = K.samples
    f = rhs.values
    u = np.zeros(grid.size, dtype=np.result_type(kernel, f))
    u[0] = f[0]

    pivot = 1.0 + (step / 6.0) * (2.0 * kernel[1, 1] + kernel[1, 0])
    _check_pivot(pivot, 1, floor)
    u[1] = (f[1] - (step / 6.0) * (2.0 * kernel[1, 0] + kernel[1, 1]) * u[0]) / pivot

    for i in range(2, grid.size):
        acc = weights[i, :i] @ (kernel[i, :i] * u[:i])
        pivot = 1.0 + weights[i, i] * kernel[i, i]
        _check_pivot(pivot, i, floor)
        u[i] = (f[i] - acc) / pivot

    return GridFunction(grid, u)


def fixed_point_residual(h: TriangularKernel, R: TriangularKernel) -> float:
    """sup |R - h - h o R| over the lower triangle"""
    _require_same_grid(h.grid, R.grid)
    composed = _compose_samples(h.samples, R.samples, h.grid)
    return float(np.max(np.abs(R.samples - h.samples - composed)))


def resolvent_agreement_bound(grid: GridSpec, scale: float) -> float:
    """Tolerance for series-vs-direct agreement: max(floor, c * h^4 * scale)"""
    cfg = Config.RESOLVENT_CONFIG
    return max(cfg['agreement_floor'], cfg['agreement_h4_factor'] * grid.step ** 4 * scale)
