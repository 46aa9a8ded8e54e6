"""
Causal Green's functions G(x, y) = theta(x - y) T(x, y).

Builders:
    build_greens           general operator, via the resolvent R
    compose                T3(x, y) = integral T_outer(x, z) T_inner(z, y) dz
    factored_greens        (d - p_1)(d - p_2)...(d - p_n)
    constant_coeff_greens  sum alpha_i d^i, through its characteristic roots
    schrodinger_greens     -d^2 + v  with  v = p^2 - p'

Each CausalGreens keeps the x-derivatives of T it can assemble from closed
formulas; derivatives are never taken by finite differences here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import factorial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config.config import Config
from core.exceptions import (DerivativeOrderError, ExponentOverflowError, GridError,
                             ImaginaryResidueError, InvalidArgumentError,
                             ResolventConvergenceError, ResolventDisagreementError)
from core.grid import (GridFunction, GridSpec, TriangularKernel, _compose_samples,
                       _require_same_grid, cumulative_integral, kernel_apply, polynomial_kernel)
from core.operator import DifferentialOperator, sample_all, sample_coeff
from core.roots import poly_roots
from core.volterra import (ResolventResult, build_h, resolvent_agreement_bound,
                           resolvent_direct, resolvent_series)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CausalGreens:
    """Assembled Green's data on one grid.

    ``derivatives[i]`` samples the i-th x-derivative of T; index 0 is T
    itself and index ``degree`` (when present) is the resolvent R.
    """

    grid: GridSpec
    degree: int
    derivatives: Tuple[TriangularKernel, ...]
    resolvent: Optional[ResolventResult] = None
    theta_at_zero: float = 1.0

    @property
    def T(self) -> TriangularKernel:
        return self.derivatives[0]

    @property
    def R(self) -> Optional[TriangularKernel]:
        if len(self.derivatives) > self.degree:
            return self.derivatives[self.degree]
        return None

    @property
    def max_order(self) -> int:
        return len(self.derivatives) - 1

    @property
    def is_complex(self) -> bool:
        return self.T.is_complex


def greens_from_resolvent(R: TriangularKernel, degree: int,
                          resolvent: Optional[ResolventResult] = None) -> CausalGreens:
    """d^i T = (x-y)^(n-i-1)/(n-i-1)! + integral (x-z)^(n-i-1)/(n-i-1)! R(z, y) dz"""
    grid = R.grid
    stack = []
    for i in range(degree):
        poly = polynomial_kernel(grid, degree - i - 1)
        stack.append(TriangularKernel(grid, poly.samples + _compose_samples(poly.samples, R.samples, grid)))
    stack.append(R)
    return CausalGreens(grid=grid, degree=degree, derivatives=tuple(stack), resolvent=resolvent)


def build_greens(op: DifferentialOperator, grid: GridSpec, tol: Optional[float] = None,
                 max_terms: Optional[int] = None, cross_check: Optional[bool] = None,
                 method: str = 'series') -> CausalGreens:
    """Green's function of a monic operator through its resolvent"""
    cfg = Config.RESOLVENT_CONFIG
    cross_check = cfg['cross_check'] if cross_check is None else cross_check
    h = build_h(op, grid)

    if method == 'direct':
        return greens_from_resolvent(resolvent_direct(h), op.degree)
    if method != 'series':
        raise InvalidArgumentError(f"unknown resolvent method '{method}'")

    result = resolvent_series(h, tol, max_terms)
    if not result.converged:
        raise ResolventConvergenceError(
            f"resolvent series did not converge: {result.terms_used} terms, "
            f"last term norm {result.last_term_norm:.3e}",
            terms_used=result.terms_used, last_term_norm=result.last_term_norm)

    if cross_check:
        direct = resolvent_direct(h)
        deviation = float(np.max(np.abs(direct.samples - result.R.samples)))
        bound = resolvent_agreement_bound(grid, max(1.0, result.R.sup_norm()))
        logger.info(f"Series vs direct resolvent deviation {deviation:.3e} (bound {bound:.3e})")
        if deviation > bound:
            raise ResolventDisagreementError(
                f"series and direct resolvents differ by {deviation:.3e} > {bound:.3e}", deviation)

    return greens_from_resolvent(result.R, op.degree, resolvent=result)


def greens_eval(G: CausalGreens, x_index: int, y_index: int):
    """theta(x - y) T(x, y) at two nodes, with theta(0) = 1"""
    if x_index < y_index:
        return 0.0
    value = G.T[x_index, y_index]
    if x_index == y_index:
        value = value * G.theta_at_zero
    return value


def t_derivative(G: CausalGreens, order: int) -> TriangularKernel:
    """Samples of the order-th x-derivative of T (order = n gives R)"""
    if isinstance(order, bool) or not 0 <= order <= G.degree:
        raise DerivativeOrderError(f"derivative order {order} outside [0, {G.degree}]")
    if order > G.max_order:
        raise DerivativeOrderError(
            f"derivative order {order} is not available for this construction "
            f"(highest assembled order {G.max_order})")
    return G.derivatives[order]


def compose(G_outer: CausalGreens, G_inner: CausalGreens) -> CausalGreens:
    """Green's function of O_inner . O_outer: T3 = integral T_outer(x, z) T_inner(z, y) dz.

    The outer kernel belongs to the factor applied first (the rightmost one
    in the operator product).
    """
    _require_same_grid(G_outer.grid, G_inner.grid)
    grid = G_outer.grid
    m = G_outer.degree
    inner = G_inner.T.samples
    stack = []
    for i in range(min(G_outer.max_order, m) + 1):
        composed = _compose_samples(G_outer.derivatives[i].samples, inner, grid)
        if i == m:
            composed = composed + inner
        stack.append(TriangularKernel(grid, composed))
    return CausalGreens(grid=grid, degree=m + G_inner.degree, derivatives=tuple(stack))


def _exponential_kernel(grid: GridSpec, exponent: np.ndarray, label: str) -> np.ndarray:
    """exp of a lower-triangular exponent matrix with an overflow guard"""
    limit = Config.GREENS_CONFIG['exp_limit']
    lower = np.tril(np.ones((grid.size, grid.size), dtype=bool))
    real_part = np.where(lower, np.real(exponent), -np.inf)
    worst = np.unravel_index(np.argmax(real_part), real_part.shape)
    if real_part[worst] > limit:
        pair = (int(worst[0]), int(worst[1]))
        raise ExponentOverflowError(
            f"exponential of {label} overflows at node pair {pair} "
            f"(exponent {real_part[worst]:.1f})", node_pair=pair)
    return np.where(lower, np.exp(np.where(lower, exponent, 0)), 0)


def _fold_first_order(factors: List[Tuple[np.ndarray, object]], grid: GridSpec,
                      full_stack: bool) -> List[np.ndarray]:
    """Fold first-order kernels E_k (each with dE_k/dx = c_k E_k) so that the last factor is outermost.

    Derivatives follow dT_new = c_k T_new + T_prev; with constant c_k the
    same rule repeats for every order.
    """
    first, coef = factors[0]
    stack = [first, _scale_rows(coef, first)]
    for kernel, coef in factors[1:]:
        current = _compose_samples(kernel, stack[0], grid)
        orders = len(stack) if full_stack else 1
        new_stack = [current]
        for j in range(1, orders + 1):
            new_stack.append(_scale_rows(coef, new_stack[j - 1]) + stack[j - 1])
        stack = new_stack
    return stack


def _scale_rows(coef, kernel: np.ndarray) -> np.ndarray:
    if np.ndim(coef) == 0:
        return coef * kernel
    return np.asarray(coef)[:, None] * kernel


def first_order_factor(p: GridFunction, label: str = 'p') -> np.ndarray:
    """exp(A(x) - A(y)) with A the cumulative antiderivative of p"""
    grid = p.grid
    antiderivative = cumulative_integral(p, 0).values
    exponent = antiderivative[:, None] - antiderivative[None, :]
    return _exponential_kernel(grid, exponent, label)


def factored_greens(p_list: Sequence[Callable[[float], float]], grid: GridSpec) -> CausalGreens:
    """Green's function of (d - p_1)(d - p_2)...(d - p_n); p_n sits outermost"""
    if not p_list:
        raise InvalidArgumentError("factored_greens needs at least one factor")
    op = DifferentialOperator(tuple(p_list), tuple(f"p{k + 1}" for k in range(len(p_list))))
    factors = []
    for k in range(op.degree):
        p = sample_coeff(op, k, grid)
        factors.append((first_order_factor(p, f"p{k + 1}"), p.values))
    # higher orders need p', so only constant factors get the whole stack
    constant = all(np.all(values == values[0]) for _, values in factors)
    stack = _fold_first_order(factors, grid, full_stack=constant)
    logger.info(f"Factored Green's function of degree {op.degree} assembled "
                f"(derivative orders 0..{len(stack) - 1})")
    return CausalGreens(grid=grid, degree=op.degree,
                        derivatives=tuple(TriangularKernel(grid, s) for s in stack))


def first_degree_greens(p: Callable[[float], float], grid: GridSpec) -> CausalGreens:
    """theta(x - y) exp(integral_y^x p) for d - p"""
    return factored_greens([p], grid)


def constant_coeff_greens(alphas: Sequence[complex], grid: GridSpec,
                          tol: Optional[float] = None) -> CausalGreens:
    """Green's function of sum_i alphas[i] d^i via the roots beta_k of sum alphas[i] X^i"""
    coeffs = np.asarray(alphas, dtype=np.complex128)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise InvalidArgumentError("need alphas[0..n] with n >= 1")
    lead = coeffs[-1]
    if lead == 0:
        raise InvalidArgumentError("leading coefficient alpha_n must be nonzero")
    degree = coeffs.size - 1
    roots = poly_roots(coeffs, tol)
    logger.info(f"Characteristic roots: {', '.join(f'{r:.6g}' for r in roots)}")

    diff = grid.nodes[:, None] - grid.nodes[None, :]
    factors = [(_exponential_kernel(grid, beta * diff, f"root {beta:.6g}"), beta) for beta in roots]
    stack = [s / lead for s in _fold_first_order(factors, grid, full_stack=True)]

    if np.all(np.imag(np.asarray(alphas, dtype=np.complex128)) == 0):
        real_sup = float(np.max(np.abs(stack[0].real)))
        imag_sup = float(np.max(np.abs(stack[0].imag)))
        ratio = imag_sup / real_sup if real_sup > 0 else imag_sup
        if ratio > Config.GREENS_CONFIG['imag_residue_ratio']:
            raise ImaginaryResidueError(
                f"real coefficients produced an imaginary residue ratio {ratio:.3e}", ratio)
        stack = [s.real for s in stack]

    return CausalGreens(grid=grid, degree=degree,
                        derivatives=tuple(TriangularKernel(grid, s) for s in stack))


def schrodinger_greens(p: Callable[[float], float], grid: GridSpec) -> CausalGreens:
    """Green's function of -d^2 + v, given p with p^2 - p' = v.

    -d^2 + v = -(d - p)(d + p), so the kernel is
    -integral exp(-(A(x) - A(z))) exp(A(z) - A(y)) dz.
    """
    op = DifferentialOperator((p,), ('p',))
    values = sample_coeff(op, 0, grid)
    inner = first_order_factor(values, 'p')
    outer = first_order_factor(-values, '-p')
    stack = _fold_first_order([(inner, values.values), (outer, -values.values)], grid, full_stack=False)
    return CausalGreens(grid=grid, degree=2,
                        derivatives=tuple(TriangularKernel(grid, -s) for s in stack))


def riccati_residual(p: Callable[[float], float], v: Callable[[float], float], grid: GridSpec,
                     dp: Optional[Callable[[float], float]] = None,
                     step: Optional[float] = None) -> GridFunction:
    """Samples of p^2 - p' - v; zero when p factorizes -d^2 + v"""
    delta = Config.GREENS_CONFIG['riccati_step'] if step is None else step
    values = []
    for x in grid.nodes:
        x = float(x)
        if dp is not None:
            slope = dp(x)
        else:
            slope = (-p(x + 2 * delta) + 8 * p(x + delta) - 8 * p(x - delta) + p(x - 2 * delta)) / (12 * delta)
        values.append(p(x) ** 2 - slope - v(x))
    residual = GridFunction(grid, values)
    logger.info(f"Riccati residual sup norm {residual.sup_norm():.3e}")
    return residual


def apply_greens(G: CausalGreens, g: GridFunction) -> GridFunction:
    """y(x) = integral over [a, x] of T(x, z) g(z) dz"""
    return kernel_apply(G.T, g)


def second_degree_series(P: Callable[[float], float], grid: GridSpec, terms: int) -> List[TriangularKernel]:
    """Leading terms of T for d^2 - P as iterated integrals.

    term_0 = x - y and term_k = integral (x - z) P(z) term_{k-1}(z, y) dz.
    """
    if terms < 1:
        raise InvalidArgumentError("terms must be at least 1")
    values = sample_coeff(DifferentialOperator((P,), ('P',)), 0, grid).values
    link = polynomial_kernel(grid, 1).samples * values[None, :]
    series = [polynomial_kernel(grid, 1)]
    for _ in range(terms - 1):
        series.append(TriangularKernel(grid, _compose_samples(link, series[-1].samples, grid)))
    return series


@dataclass(frozen=True, eq=False)
class InteriorResidual:
    """Residual samples on the nodes where the difference stencils fit"""

    grid: GridSpec
    indices: np.ndarray
    values: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes[self.indices]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def central_difference_weights(order: int, half_width: int) -> np.ndarray:
    """Weights w_j (j = -p..p) with sum w_j f(x + j h) ~ h^order f^(order)(x)"""
    offsets = np.arange(-half_width, half_width + 1, dtype=float)
    moments = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = factorial(order)
    return np.linalg.solve(moments, rhs)


def _half_width(order: int) -> int:
    return (order + 1) // 2 + 1


def operator_residual(op: DifferentialOperator, f: GridFunction) -> InteriorResidual:
    """(O f)(x) on interior nodes, derivatives by fourth-order central differences"""
    grid = f.grid
    n = op.degree
    min_nodes = Config.GREENS_CONFIG['residual_min_nodes_per_degree'] * n
    if grid.n_intervals < min_nodes:
        raise GridError(f"grid too coarse for residual check: N={grid.n_intervals} < {min_nodes}")
    margin = _half_width(n)
    indices = np.arange(margin, grid.n_intervals - margin + 1)
    coeffs = sample_all(op, grid)[:, indices]
    values = f.values

    def derivative(order: int) -> np.ndarray:
        if order == 0:
            return values[indices]
        width = _half_width(order)
        weights = central_difference_weights(order, width)
        acc = np.zeros(indices.size, dtype=values.dtype)
        for offset, weight in zip(range(-width, width + 1), weights):
            acc += weight * values[indices + offset]
        return acc / grid.step ** order

    residual = derivative(n)
    for k in range(n):
        residual = residual + coeffs[k] * derivative(k)
    return InteriorResidual(grid=grid, indices=indices, values=residual)
