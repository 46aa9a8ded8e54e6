"""
Closed forms and independent integrators used to validate the numerical kernels.

Everything here is evaluated with scipy (special functions, DOP853), never
with the Volterra machinery it is compared against.
"""

import logging
from typing import Callable, List, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, special

from config.config import Config

logger = logging.getLogger(__name__)


def sinh_kernel(omega: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """T for d^2 - omega^2"""
    def kernel(x, y):
        return np.sinh(omega * (x - y)) / omega
    return kernel


def erf_kernel(x, y):
    """T for (d + 2x)(d + x) = d^2 + 3x d + 2x^2 + 1"""
    root = np.sqrt(2.0)
    return np.sqrt(np.pi / 2.0) * np.exp(y ** 2 - x ** 2 / 2.0) * (special.erf(x / root) - special.erf(y / root))


def erfi_kernel(x, y):
    """T for (d + x)(d + 2x) = d^2 + 3x d + 2x^2 + 2"""
    root = np.sqrt(2.0)
    return np.sqrt(np.pi / 2.0) * np.exp(y ** 2 / 2.0 - x ** 2) * (special.erfi(x / root) - special.erfi(y / root))


def third_order_alphas(alpha: float, omega: float) -> List[complex]:
    """Coefficients of (d - i alpha)(d^2 - omega^2), lowest order first"""
    return [1j * alpha * omega ** 2, -omega ** 2, -1j * alpha, 1.0]


def third_order_kernel(alpha: float, omega: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    def kernel(x, y):
        t = x - y
        return ((np.exp(omega * t) - np.exp(1j * alpha * t)) / (alpha ** 2 + omega ** 2)
                - np.sinh(omega * t) / (1j * alpha * omega + omega ** 2))
    return kernel


def airy_kernel(x, y):
    """T for d^2 - x; the Wronskian of Ai and Bi is 1/pi"""
    ai_x, _, bi_x, _ = special.airy(x)
    ai_y, _, bi_y, _ = special.airy(y)
    return np.pi * (ai_y * bi_x - ai_x * bi_y)


def airy_series_terms(x: float, y: float, count: int) -> List[float]:
    """Leading terms of T for d^2 - x as exact polynomials, evaluated at (x, y).

    term_0 = z - y and term_k(z) = integral_y^z (z - s) s term_{k-1}(s) ds.
    """
    term = Polynomial([-y, 1.0])
    values = [float(term(x))]
    for _ in range(count - 1):
        integrand = Polynomial([0.0, 1.0]) * term
        once = integrand.integ()
        twice = once.integ()
        term = twice - twice(y) - once(y) * Polynomial([-y, 1.0])
        values.append(float(term(x)))
    return values


def dirichlet_kernel_free(a: float, b: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """G for d^2 with y(a) = y(b) = 0"""
    def kernel(x, y):
        low, high = np.minimum(x, y), np.maximum(x, y)
        return (low - a) * (high - b) / (b - a)
    return kernel


def dirichlet_kernel_sinh(omega: float, a: float, b: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """G for d^2 - omega^2 with y(a) = y(b) = 0"""
    def kernel(x, y):
        low, high = np.minimum(x, y), np.maximum(x, y)
        return -np.sinh(omega * (low - a)) * np.sinh(omega * (b - high)) / (omega * np.sinh(omega * (b - a)))
    return kernel


def _first_order_system(coeffs: Sequence[Callable[[float], float]], g: Callable[[float], float]):
    n = len(coeffs)

    def rhs(x, state):
        derivative = np.empty(n)
        derivative[:-1] = state[1:]
        derivative[-1] = g(x) - sum(coeffs[k](x) * state[k] for k in range(n))
        return derivative

    return rhs


def ode_reference(coeffs: Sequence[Callable[[float], float]], initial: Sequence[float], start: float,
                  x_values: Sequence[float], g: Callable[[float], float] = lambda x: 0.0,
                  max_step: float = np.inf) -> np.ndarray:
    """d^k y at the requested points, rows k = 0..n-1, by DOP853 from ``start``"""
    cfg = Config.ACCEPTANCE_CONFIG
    x_values = np.asarray(x_values, dtype=float)
    initial = np.asarray(initial, dtype=float)
    out = np.empty((len(coeffs), x_values.size))
    at_start = np.isclose(x_values, start, rtol=0.0, atol=1e-14)
    out[:, at_start] = initial[:, None]
    targets = x_values[~at_start]
    if targets.size:
        forward = bool(targets.max() > start)
        order = np.argsort(targets) if forward else np.argsort(targets)[::-1]
        end = float(targets[order[-1]])
        solution = integrate.solve_ivp(_first_order_system(coeffs, g), (start, end), initial,
                                       method='DOP853', t_eval=targets[order],
                                       rtol=cfg['oracle_rtol'], atol=cfg['oracle_atol'], max_step=max_step)
        if not solution.success:
            raise RuntimeError(f"reference integrator failed: {solution.message}")
        values = np.empty((len(coeffs), targets.size))
        values[:, order] = solution.y
        out[:, ~at_start] = values
    return out


def reference_kernel_column(coeffs: Sequence[Callable[[float], float]], y: float,
                            x_values: Sequence[float], max_step: float = np.inf) -> np.ndarray:
    """T(x, y) for x >= y from the homogeneous problem with unit top derivative at y"""
    initial = np.zeros(len(coeffs))
    initial[-1] = 1.0
    return ode_reference(coeffs, initial, y, x_values, max_step=max_step)[0]
