"""Sample grids and grid functions on the unit cube.

A Grid places a tensor Gauss rule on every cell of the finest dyadic
partition; a GridFunction is the package's universal numeric stand-in for an
element of L_p: its values at all grid nodes. Every integral is a weighted
sum, reproducible bit for bit, and exact for piecewise polynomials up to the
quadrature degree on cells aligned with the partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quadrature import gauss_rule, interval_basis_table

__all__ = [
    "Grid",
    "GridFunction",
    "LocalPoly",
    "grid_for",
    "local_project",
    "lp_norm",
]

# default finest dyadic level per dimension; memory grows like 2^(K d)
_DEFAULT_LEVEL = {1: 6, 2: 6, 3: 4}


def _as_tuple(value, d: int, name: str) -> tuple[int, ...]:
    if np.isscalar(value):
        return (int(value),) * d
    out = tuple(int(v) for v in value)
    if len(out) != d:
        raise ValueError(f"{name} must have length {d}, got {out}")
    return out


class Grid:
    """Tensor Gauss grid over the level-K dyadic partition of the unit cube."""

    __slots__ = ("d", "level", "nodes_per_cell", "axis_nodes", "axis_weights", "_cache")

    def __init__(self, d: int, level: int, nodes_per_cell):
        d = int(d)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        level = int(level)
        if level < 0:
            raise ValueError(f"finest level must be >= 0, got {level}")
        self.d = d
        self.level = level
        self.nodes_per_cell = _as_tuple(nodes_per_cell, d, "nodes_per_cell")
        nodes = []
        weights = []
        cells = 2 ** level
        for n in self.nodes_per_cell:
            g, w = gauss_rule(n)
            offsets = np.arange(cells)[:, None]
            nodes.append(((offsets + g[None, :]) / cells).ravel())
            weights.append(np.tile(w / cells, cells))
        self.axis_nodes = tuple(nodes)
        self.axis_weights = tuple(weights)
        self._cache: dict = {}

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.axis_nodes)

    @property
    def cells_per_axis(self) -> int:
        return 2 ** self.level

    def axis_cell_nodes(self, axis: int, m: int) -> int:
        """Number of grid nodes inside one level-m cell along the axis."""
        if not 0 <= m <= self.level:
            raise ValueError(f"level {m} outside grid resolution 0..{self.level}")
        return (2 ** (self.level - m)) * self.nodes_per_cell[axis]

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.shape))

    def function(self, values) -> "GridFunction":
        values = np.asarray(values, dtype=float)
        if values.shape != self.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.shape}")
        return GridFunction(self, values)

    def sample(self, fn: Callable) -> "GridFunction":
        """Evaluate fn(x_1, ..., x_d) at every grid node (vectorized)."""
        mesh = np.meshgrid(*self.axis_nodes, indexing="ij", sparse=True)
        values = np.broadcast_to(np.asarray(fn(*mesh), dtype=float), self.shape)
        return GridFunction(self, np.array(values, dtype=float))

    def integrate(self, values: np.ndarray) -> float:
        out = np.asarray(values, dtype=float)
        for w in reversed(self.axis_weights):
            out = np.tensordot(out, w, axes=([out.ndim - 1], [0]))
        return float(out)

    def cube_slices(self, cube) -> tuple[slice, ...]:
        """Index ranges of the nodes lying inside a dyadic cube of the unit cube."""
        if len(cube.level) != self.d:
            raise ValueError(f"cube dimension {len(cube.level)} does not match grid d={self.d}")
        slices = []
        for j, (m, pos) in enumerate(zip(cube.level, cube.pos)):
            if m > self.level:
                raise ValueError(
                    f"cube level {m} on axis {j} exceeds grid resolution {self.level}"
                )
            if not 0 <= pos < 2 ** m:
                raise ValueError(f"cube position {pos} outside the unit cube at level {m}")
            span = self.axis_cell_nodes(j, m)
            slices.append(slice(pos * span, (pos + 1) * span))
        return tuple(slices)


def grid_for(d: int, degree=0, level: int | None = None, nodes_per_cell=None) -> Grid:
    """Grid sized for work at the given per-axis polynomial degree.

    Nodes per cell default to 2*degree+2 per axis (exact products of two
    basis polynomials, plus headroom for non-polynomial inputs); an explicit
    nodes_per_cell only ever raises the count.
    """
    d = int(d)
    degs = _as_tuple(degree, d, "degree")
    if any(l < 0 for l in degs):
        raise ValueError(f"degrees must be >= 0, got {degs}")
    if level is None:
        level = _DEFAULT_LEVEL.get(d, 4)
    base = tuple(2 * l + 2 for l in degs)
    if nodes_per_cell is None:
        nodes = base
    else:
        asked = _as_tuple(nodes_per_cell, d, "nodes_per_cell")
        nodes = tuple(max(b, a) for b, a in zip(base, asked))
    return Grid(d, level, nodes)


class GridFunction:
    """Values of a function at every node of a Grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        self.grid = grid
        self.values = values

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def _check_same_grid(self, other: "GridFunction") -> None:
        if other.grid is not self.grid and other.grid.shape != self.grid.shape:
            raise ValueError("grid functions live on different grids")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - float(other))

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def inner(self, other: "GridFunction") -> float:
        self._check_same_grid(other)
        return self.grid.integrate(self.values * other.values)

    def lp_norm(self, p: float) -> float:
        return lp_norm(self, p)


def lp_norm(f: GridFunction, p: float) -> float:
    """Quadrature L_p norm on the unit cube; p = inf gives the grid sup (diagnostic only)."""
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    return f.grid.integrate(np.abs(f.values) ** p) ** (1.0 / p)


@dataclass(frozen=True)
class LocalPoly:
    """Tensor polynomial on one dyadic cube, in the orthonormal-on-cube Legendre basis.

    coeffs has shape (l_1+1, ..., l_d+1).
    """

    cube: object
    degrees: tuple[int, ...]
    coeffs: np.ndarray

    def values_on(self, grid: Grid) -> np.ndarray:
        """Evaluate on the grid; zero outside the cube. Returns a full-size array."""
        slices = grid.cube_slices(self.cube)
        out = np.zeros(grid.shape)
        block = self.coeffs
        for j, l in enumerate(self.degrees):
            xs = grid.axis_nodes[j][slices[j]]
            lo = self.cube.pos[j] / 2 ** self.cube.level[j]
            width = 1.0 / 2 ** self.cube.level[j]
            table = interval_basis_table(l, xs, lo, width)
            block = np.tensordot(block, table, axes=([0], [0]))
        out[slices] = block
        return out


def local_project(f: GridFunction, cube, degrees) -> LocalPoly:
    """L2-orthogonal projection of f onto tensor polynomials on one dyadic cube.

    Coefficients are inner products against the orthonormal tensor Legendre
    basis of the cube; exact reproduction when f restricted to the cube is a
    polynomial of per-axis degree <= degrees.
    """
    grid = f.grid
    degs = _as_tuple(degrees, grid.d, "degrees")
    slices = grid.cube_slices(cube)
    block = f.values[slices]
    for j, l in enumerate(degs):
        xs = grid.axis_nodes[j][slices[j]]
        ws = grid.axis_weights[j][slices[j]]
        lo = cube.pos[j] / 2 ** cube.level[j]
        width = 1.0 / 2 ** cube.level[j]
        analysis = interval_basis_table(l, xs, lo, width) * ws
        # contract the leading sample axis; finished coefficient axes cycle to the end,
        # so after all d contractions the shape is (l_1+1, ..., l_d+1)
        block = np.tensordot(analysis, block, axes=([1], [0]))
        block = np.moveaxis(block, 0, -1)
    return LocalPoly(cube=cube, degrees=degs, coeffs=np.ascontiguousarray(block))
