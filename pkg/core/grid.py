"""
Uniform grids, sampled functions and triangular kernels, plus the
quadrature primitives the rest of the package is built on.

Span weights: an integral over ``m`` panels ending at node ``u`` is
``sum_s V[m, s] * f[u - s]``. Even spans use composite Simpson, odd spans
of three or more panels close with the three-eighths rule over the final
three panels instead of a trapezoid panel, so every span of two or more
panels stays fourth order. Single panels are special-cased by the
callers: cumulative integrals borrow one neighbouring node, kernel
products integrate the product of the linear interpolants of both factors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Callable, Tuple, Union

import numpy as np

from config.config import Config
from core.exceptions import GridError, GridMismatchError, NonFiniteValueError

logger = logging.getLogger(__name__)

Scalar = Union[float, complex]


@dataclass(frozen=True)
class GridSpec:
    """Uniform discretization of [a, b] with N + 1 nodes.

    The grid owns the quadrature weight tables; they are built lazily and
    shared by every kernel living on the grid.
    """

    a: float
    b: float
    n_intervals: int

    def __post_init__(self) -> None:
        try:
            a, b = float(self.a), float(self.b)
        except (TypeError, ValueError):
            raise GridError(f"grid endpoints must be real numbers, got {self.a!r}, {self.b!r}")
        if not (np.isfinite(a) and np.isfinite(b)):
            raise GridError("grid endpoints must be finite")
        if not a < b:
            raise GridError(f"degenerate interval [{a}, {b}]: need a < b")
        if isinstance(self.n_intervals, bool) or int(self.n_intervals) != self.n_intervals:
            raise GridError(f"n_intervals must be an integer, got {self.n_intervals!r}")
        n = int(self.n_intervals)
        if n < Config.GRID_CONFIG['min_intervals'] or n % 2:
            raise GridError(f"n_intervals must be even and at least "
                            f"{Config.GRID_CONFIG['min_intervals']}, got {n}")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'n_intervals', n)

    @property
    def step(self) -> float:
        return (self.b - self.a) / self.n_intervals

    @property
    def size(self) -> int:
        """Number of nodes, N + 1"""
        return self.n_intervals + 1

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.a, self.b, self.size)
        nodes.setflags(write=False)
        return nodes

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the node at ``x``; raises if ``x`` is not a node"""
        position = (float(x) - self.a) / self.step
        index = int(round(position))
        if index < 0 or index > self.n_intervals or abs(self.nodes[index] - x) > tol * (self.b - self.a):
            raise GridError(f"point {x} is not a node of the grid [{self.a}, {self.b}] "
                            f"with N={self.n_intervals}")
        return index

    @cached_property
    def span_weights(self) -> np.ndarray:
        """Table V[m, s]: weight of node ``upper - s`` for an integral over m panels"""
        n, h = self.n_intervals, self.step
        table = np.zeros((n + 1, n + 1))
        table[1, :2] = 0.5 * h
        for m in range(2, n + 1):
            if m % 2 == 0:
                table[m, :m + 1] = _simpson_weights(m, h)
            else:
                table[m, :4] += 0.375 * h * np.array([1.0, 3.0, 3.0, 1.0])
                if m > 3:
                    table[m, 3:m + 1] += _simpson_weights(m - 3, h)
        table.setflags(write=False)
        logger.debug(f"Built span weights for N={n}")
        return table

    @cached_property
    def apply_weights(self) -> np.ndarray:
        """Matrix W[i, k]: weight of node k in an integral from x_0 to x_i"""
        table = self.span_weights
        weights = np.zeros_like(table)
        for i in range(self.size):
            weights[i, :i + 1] = table[i, i::-1]
        weights.setflags(write=False)
        return weights

    def check_spacing(self) -> None:
        """Nodes must be equispaced within a few machine epsilons of the step"""
        spacing = np.diff(self.nodes)
        scale = max(1.0, abs(self.a), abs(self.b))
        limit = Config.GRID_CONFIG['spacing_eps_factor'] * np.finfo(float).eps * scale
        worst = float(np.max(np.abs(spacing - self.step)))
        if worst > limit:
            raise GridError(f"node spacing deviates from the step by {worst:.3e}; "
                            f"interval too short for its magnitude")


def _simpson_weights(n_panels: int, h: float) -> np.ndarray:
    weights = np.full(n_panels + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    return weights * (h / 3.0)


def make_grid(a: float, b: float, n_intervals: int) -> GridSpec:
    """Build a validated uniform grid"""
    grid = GridSpec(a, b, n_intervals)
    grid.check_spacing()
    logger.info(f"Grid [{grid.a}, {grid.b}] with N={grid.n_intervals}, step={grid.step:.6g}")
    return grid


def _freeze(values, shape: Tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, copy=True)
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128)
    else:
        arr = arr.astype(np.float64)
    if arr.shape != shape:
        raise GridError(f"{what} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValueError(f"{what} has a non-finite entry at index {tuple(int(i) for i in bad)}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real or complex samples of a one-variable function on the grid nodes"""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', _freeze(self.values, (self.grid.size,), 'GridFunction'))

    @classmethod
    def from_callable(cls, grid: GridSpec, func: Callable[[float], Scalar]) -> 'GridFunction':
        return cls(grid, [func(float(x)) for x in grid.nodes])

    @classmethod
    def constant(cls, grid: GridSpec, value: Scalar) -> 'GridFunction':
        return cls(grid, np.full(grid.size, value))

    @property
    def kind(self) -> str:
        return 'complex' if self.is_complex else 'real'

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def real(self) -> 'GridFunction':
        return GridFunction(self.grid, self.values.real)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            _require_same_grid(self.grid, other.grid)
            return other.values
        return other

    def __add__(self, other) -> 'GridFunction':
        return GridFunction(self.grid, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other) -> 'GridFunction':
        return GridFunction(self.grid, self.values - self._other_values(other))

    def __mul__(self, other) -> 'GridFunction':
        return GridFunction(self.grid, self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self) -> 'GridFunction':
        return GridFunction(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class TriangularKernel:
    """Samples K(x_i, x_j) for i >= j; the strict upper triangle is stored as zero"""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self) -> None:
        size = self.grid.size
        arr = np.asarray(self.samples)
        if arr.shape != (size, size):
            raise GridError(f"kernel must have shape {(size, size)}, got {arr.shape}")
        object.__setattr__(self, 'samples', _freeze(np.tril(arr), (size, size), 'TriangularKernel'))

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> 'TriangularKernel':
        """Sample a vectorised ``func(x, y)`` on the lower triangle"""
        x = grid.nodes[:, None]
        y = grid.nodes[None, :]
        lower = x >= y
        with np.errstate(all='ignore'):
            values = np.asarray(func(np.broadcast_to(x, (grid.size, grid.size)),
                                     np.broadcast_to(y, (grid.size, grid.size))))
        return cls(grid, np.where(lower, values, 0))

    @classmethod
    def zeros(cls, grid: GridSpec) -> 'TriangularKernel':
        return cls(grid, np.zeros((grid.size, grid.size)))

    @property
    def kind(self) -> str:
        return 'complex' if self.is_complex else 'real'

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    def __getitem__(self, index: Tuple[int, int]) -> Scalar:
        i, j = index
        if i < j:
            return 0.0
        return self.samples[i, j].item()

    def column(self, j: int) -> GridFunction:
        return GridFunction(self.grid, self.samples[:, j])

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.samples).copy()

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def real(self) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples.real)

    def imag(self) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples.imag)

    def _other_samples(self, other):
        if isinstance(other, TriangularKernel):
            _require_same_grid(self.grid, other.grid)
            return other.samples
        return other

    def __add__(self, other) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples + self._other_samples(other))

    def __sub__(self, other) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples - self._other_samples(other))

    def __mul__(self, other) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples * self._other_samples(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'TriangularKernel':
        return TriangularKernel(self.grid, self.samples / other)

    def __neg__(self) -> 'TriangularKernel':
        return TriangularKernel(self.grid, -self.samples)


def _require_same_grid(first: GridSpec, second: GridSpec) -> None:
    if first != second:
        raise GridMismatchError(
            f"grid mismatch: [{first.a}, {first.b}] N={first.n_intervals} vs "
            f"[{second.a}, {second.b}] N={second.n_intervals}")


def polynomial_kernel(grid: GridSpec, power: int) -> TriangularKernel:
    """(x - y)^p / p! on the lower triangle"""
    diff = grid.nodes[:, None] - grid.nodes[None, :]
    return TriangularKernel(grid, np.tril(diff ** power / factorial(power)))


def single_panel_product(step: float, a0, a1, b0, b1):
    """Integral over one panel of the product of the linear interpolants of a and b"""
    return (step / 6.0) * (2.0 * a0 * b0 + 2.0 * a1 * b1 + a0 * b1 + a1 * b0)


def _single_panel(values: np.ndarray, lo: int, grid: GridSpec):
    """Three-point rule for the panel [x_lo, x_lo+1], sharing one neighbour"""
    h = grid.step
    if lo + 2 <= grid.n_intervals:
        return h * (5.0 * values[lo] + 8.0 * values[lo + 1] - values[lo + 2]) / 12.0
    return h * (-values[lo - 1] + 8.0 * values[lo] + 5.0 * values[lo + 1]) / 12.0


def cumulative_integral(f: GridFunction, from_index: int) -> GridFunction:
    """F[i] = integral of f from x_from to x_i (oriented: negative for i < from)"""
    grid = f.grid
    n = grid.n_intervals
    if isinstance(from_index, bool) or not 0 <= int(from_index) <= n:
        raise GridError(f"from_index must lie in [0, {n}], got {from_index}")
    start = int(from_index)
    values = f.values
    out = np.zeros_like(values)

    forward = n - start
    out[start:] = grid.apply_weights[:forward + 1, :forward + 1] @ values[start:]
    out[start::-1] = -(grid.span_weights[:start + 1, :start + 1] @ values[start::-1])

    if start < n:
        out[start + 1] = _single_panel(values, start, grid)
    if start > 0:
        out[start - 1] = -_single_panel(values, start - 1, grid)
    out[start] = 0.0
    return GridFunction(grid, out)


def _compose_samples(outer: np.ndarray, inner: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Integral over z in [x_j, x_i] of outer(x_i, z) * inner(z, x_j), for i >= j"""
    table = grid.span_weights
    dtype = np.result_type(outer, inner)
    out = np.zeros(outer.shape, dtype=dtype)
    for i in range(2, grid.size):
        weights = table[i::-1, i::-1]
        out[i, :i + 1] = (weights * inner[:i + 1, :i + 1].T) @ outer[i, :i + 1]
    rows = np.arange(1, grid.size)
    out[rows, rows - 1] = single_panel_product(
        grid.step,
        outer[rows, rows - 1], outer[rows, rows],
        inner[rows - 1, rows - 1], inner[rows, rows - 1])
    out[rows, rows] = 0.0
    out[0, 0] = 0.0
    return out


def kernel_compose(outer: TriangularKernel, inner: TriangularKernel) -> TriangularKernel:
    """Kernel composition (x, y) -> integral over [y, x] of outer(x, z) inner(z, y) dz"""
    _require_same_grid(outer.grid, inner.grid)
    return TriangularKernel(outer.grid, _compose_samples(outer.samples, inner.samples, outer.grid))


def _apply_samples(kernel: np.ndarray, values: np.ndarray, grid: GridSpec) -> np.ndarray:
    out = (grid.apply_weights * kernel) @ values
    out[0] = 0.0
    out[1] = single_panel_product(grid.step, kernel[1, 0], kernel[1, 1], values[0], values[1])
    return out


def kernel_apply(kernel: TriangularKernel, f: GridFunction) -> GridFunction:
    """y(x_i) = integral over [a, x_i] of K(x_i, z) f(z) dz"""
    _require_same_grid(kernel.grid, f.grid)
    return GridFunction(kernel.grid, _apply_samples(kernel.samples, f.values, kernel.grid))
