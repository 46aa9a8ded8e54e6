"""
Monic linear differential operators  d^n + P_{n-1} d^{n-1} + ... + P_0
and the initial data they are solved with.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

import numpy as np

from core.exceptions import CoefficientError, InvalidArgumentError
from core.grid import GridFunction, GridSpec

logger = logging.getLogger(__name__)

CoefficientFunction = Callable[[float], float]


def _constant(value: float) -> CoefficientFunction:
    def coefficient(x: float) -> float:
        return value
    return coefficient


@dataclass(frozen=True)
class DifferentialOperator:
    """Monic operator of degree n; ``coeffs[k]`` multiplies the k-th derivative"""

    coeffs: Tuple[CoefficientFunction, ...]
    labels: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise InvalidArgumentError("operator degree must be at least 1")
        for k, func in enumerate(coeffs):
            if not callable(func):
                raise InvalidArgumentError(f"coefficient P_{k} is not callable")
        object.__setattr__(self, 'coeffs', coeffs)
        labels = tuple(self.labels) or tuple(f"P{k}" for k in range(len(coeffs)))
        object.__setattr__(self, 'labels', labels)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_constants(cls, values: Sequence[float]) -> 'DifferentialOperator':
        """Constant coefficients [P_0, ..., P_{n-1}]"""
        return cls(tuple(_constant(float(v)) for v in values),
                   tuple(repr(float(v)) for v in values))

    @classmethod
    def pure_derivative(cls, degree: int) -> 'DifferentialOperator':
        """The operator d^n (all coefficients zero)"""
        return cls.from_constants([0.0] * degree)

    def describe(self) -> str:
        terms = [f"d^{self.degree}"]
        for k in range(self.degree - 1, -1, -1):
            terms.append(f"({self.labels[k]})*d^{k}")
        return ' + '.join(terms)


@dataclass(frozen=True)
class InitialConditions:
    """Derivative data c_0..c_{n-1} holding at ``anchor``"""

    values: Tuple[float, ...]
    anchor: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        object.__setattr__(self, 'anchor', float(self.anchor))

    @classmethod
    def zeros(cls, degree: int, anchor: float) -> 'InitialConditions':
        return cls((0.0,) * degree, anchor)

    @classmethod
    def unit(cls, degree: int, r: int, anchor: float) -> 'InitialConditions':
        """Data with d^i u(anchor) = delta_{r,i}"""
        values = [0.0] * degree
        values[r] = 1.0
        return cls(tuple(values), anchor)

    def __len__(self) -> int:
        return len(self.values)


def sample_coeff(op: DifferentialOperator, k: int, grid: GridSpec) -> GridFunction:
    """Pointwise samples P_k(x_i)"""
    if isinstance(k, bool) or not 0 <= k < op.degree:
        raise InvalidArgumentError(f"coefficient index {k} out of range for degree {op.degree}")
    func = op.coeffs[k]
    values = np.empty(grid.size)
    for i, x in enumerate(grid.nodes):
        try:
            value = float(func(float(x)))
        except CoefficientError:
            raise
        except (ArithmeticError, ValueError) as e:
            # ExpressionDomainError is a ValueError
            raise CoefficientError(f"coefficient P_{k} failed at node {i} (x={x}): {e}",
                                   node=i, x=float(x), k=k) from e
        if not np.isfinite(value):
            raise CoefficientError(f"coefficient P_{k} is non-finite at node {i} (x={x})",
                                   node=i, x=float(x), k=k)
        values[i] = value
    return GridFunction(grid, values)


def sample_all(op: DifferentialOperator, grid: GridSpec) -> np.ndarray:
    """Array of shape (n, N+1) with row k holding P_k on the nodes"""
    return np.vstack([sample_coeff(op, k, grid).values for k in range(op.degree)])


def _reflected(func: CoefficientFunction, sign: float, a: float, b: float) -> CoefficientFunction:
    def coefficient(t: float) -> float:
        return sign * func(a + b - t)
    return coefficient


def reflect_operator(op: DifferentialOperator, grid: GridSpec) -> DifferentialOperator:
    """Operator seen in the reflected variable t = a + b - x.

    If O y = g then y(x) = Y(a + b - x) where Y solves the returned operator
    with right-hand side (-1)^n g(a + b - t).
    """
    n = op.degree
    coeffs = tuple(_reflected(func, (-1.0) ** (n + k), grid.a, grid.b)
                   for k, func in enumerate(op.coeffs))
    labels = tuple(f"reflected({label})" for label in op.labels)
    return DifferentialOperator(coeffs, labels)

