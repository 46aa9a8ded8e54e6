"""Durand-Kerner simultaneous iteration for polynomial roots."""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from config.config import Config
from core.exceptions import InvalidArgumentError, RootConvergenceError

logger = logging.getLogger(__name__)


def _sort_key(root: complex):
    # rounding keeps the order stable against last-bit noise in the real part
    return (round(root.real, 9), round(root.imag, 9))


def poly_roots(alphas: Sequence[complex], tol: Optional[float] = None,
               max_sweeps: Optional[int] = None) -> np.ndarray:
    """Roots of sum_i alphas[i] X^i, sorted by (real, imag)"""
    cfg = Config.ROOTS_CONFIG
    tol = cfg['tol'] if tol is None else tol
    max_sweeps = cfg['max_sweeps'] if max_sweeps is None else max_sweeps

    coeffs = np.asarray(alphas, dtype=np.complex128)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise InvalidArgumentError("polynomial degree must be at least 1")
    if coeffs[-1] == 0:
        raise InvalidArgumentError("leading coefficient must be nonzero")
    if not np.all(np.isfinite(coeffs)):
        raise InvalidArgumentError("polynomial coefficients must be finite")

    monic = coeffs / coeffs[-1]
    degree = monic.size - 1
    if degree == 1:
        return np.array([-monic[0]])

    highest_first = monic[::-1]
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    roots = radius * cfg['seed'] ** np.arange(degree)

    for sweep in range(1, max_sweeps + 1):
        values = np.polyval(highest_first, roots)
        gaps = roots[:, None] - roots[None, :]
        np.fill_diagonal(gaps, 1.0)
        denominators = np.prod(gaps, axis=1)
        if np.any(denominators == 0):
            raise RootConvergenceError("root estimates collided during iteration",
                                       np.abs(values))
        delta = values / denominators
        roots = roots - delta
        movement = float(np.max(np.abs(delta)))
        logger.debug(f"Durand-Kerner sweep {sweep}: max movement {movement:.3e}")
        if not np.all(np.isfinite(roots)):
            raise RootConvergenceError("root iteration diverged", np.abs(values))
        if movement <= tol:
            logger.info(f"Durand-Kerner converged in {sweep} sweeps")
            return np.array(sorted(roots, key=_sort_key))

    residuals = np.abs(np.polyval(highest_first, roots))
    # repeated roots stall near sqrt(eps) in position while their residual sits at round-off
    floor = 1e3 * np.finfo(float).eps * np.polyval(np.abs(highest_first), np.abs(roots))
    if np.all(residuals <= floor):
        logger.warning(f"Durand-Kerner movement stayed above {tol:.1e}; accepting clustered roots "
                       f"with residuals at round-off level")
        return np.array(sorted(roots, key=_sort_key))
    raise RootConvergenceError(
        f"roots did not converge after {max_sweeps} sweeps "
        f"(max residual {float(np.max(residuals)):.3e})", residuals)
