"""Maximal functions, Whitney cube decompositions, good/bad splittings.

The chain runs: a grid Hardy-Littlewood maximal function, its sublevel set
as a union of closed finest-level cells, a greedy dyadic Whitney
decomposition of the complement, and the resulting split of a function into
a bounded good part plus mean-zero bad blocks supported on the Whitney
cubes.  All cube-to-set distances are decided in exact integer arithmetic
at the finest dyadic scale, so the strict inequalities of the construction
never hinge on float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grid import Grid, GridFunction
from .indexing import DyadicCube

__all__ = [
    "CellSet",
    "WhitneyDecomposition",
    "CZSplit",
    "maximal_function",
    "level_set_measure",
    "sublevel_cellset",
    "whitney",
    "cz_split",
    "cz_constants",
]


@dataclass(frozen=True)
class CellSet:
    """Union of closed finest-level cells of the uniform dyadic mesh on the unit cube.

    mask[nu] set means the closed cell nu * 2^-K + [0, 2^-K]^d belongs to the
    set.  closed=False tags the complementary open set; the two differ only
    by the measure-zero cell faces.
    """

    resolution: int
    mask: np.ndarray
    closed: bool = True

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if self.resolution < 0:
            raise ValueError(f"resolution must be >= 0, got {self.resolution}")
        if mask.ndim < 1 or mask.shape != (2 ** self.resolution,) * mask.ndim:
            raise ValueError(
                f"mask shape {mask.shape} does not match resolution {self.resolution}"
            )
        object.__setattr__(self, "mask", mask)

    @property
    def d(self) -> int:
        return self.mask.ndim

    def complement(self) -> "CellSet":
        return CellSet(self.resolution, ~self.mask, closed=not self.closed)

    def measure(self) -> Fraction:
        # exact: cell count times the cell measure 2^(-d K)
        return int(self.mask.sum()) * Fraction(1, 2 ** (self.d * self.resolution))

    def cubes(self) -> list[DyadicCube]:
        lev = (self.resolution,) * self.d
        return [DyadicCube(lev, tuple(int(v) for v in nu)) for nu in np.argwhere(self.mask)]


def _node_coords(grid: Grid) -> np.ndarray:
    return np.stack(np.meshgrid(*grid.axis_nodes, indexing="ij"), axis=-1).reshape(-1, grid.d)


def _node_weights(grid: Grid) -> np.ndarray:
    w = grid.axis_weights[0]
    for aw in grid.axis_weights[1:]:
        w = np.multiply.outer(w, aw)
    return w.reshape(-1)


def _ball_measure(d: int, radii: np.ndarray) -> np.ndarray:
    if d == 1:
        return 2.0 * radii
    return np.pi * radii ** 2


def maximal_function(f: GridFunction) -> GridFunction:
    """Grid Hardy-Littlewood maximal function with Euclidean balls.

    The function is extended by zero outside the unit cube, so the ball
    integral is just the quadrature sum over nodes inside the ball while the
    ball measure stays the full 2r resp. pi r^2.  The supremum over radii is
    realized on the finite family of node-to-node distances; radii never
    drop below the cell diagonal sqrt(d) 2^-K, which keeps the smallest ball
    at least one quadrature cell wide.  Edge cells lend the ball their whole
    quadrature weight, so the denominator is floored by the covered weight;
    without that floor a constant would overshoot its own sup.
    """
    grid = f.grid
    if grid.d > 2:
        raise NotImplementedError("maximal function is implemented for d <= 2 only")
    coords = _node_coords(grid)
    w = _node_weights(grid)
    wf = w * np.abs(f.values).reshape(-1)
    n = coords.shape[0]
    r_min = math.sqrt(grid.d) * 2.0 ** -grid.level
    out = np.empty(n)
    # chunked pairwise distances keep memory at chunk * n floats
    chunk = max(1, min(n, 2 ** 22 // n))
    for start in range(0, n, chunk):
        block = coords[start:start + chunk]
        diff = block[:, None, :] - coords[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=-1))
        order = np.argsort(dist, axis=1)
        radii = np.maximum(np.take_along_axis(dist, order, axis=1), r_min)
        mass = np.cumsum(wf[order], axis=1)
        denom = np.maximum(_ball_measure(grid.d, radii), np.cumsum(w[order], axis=1))
        out[start:start + chunk] = (mass / denom).max(axis=1)
    return GridFunction(grid, out.reshape(grid.shape))


def level_set_measure(h: GridFunction, alpha: float) -> float:
    """Quadrature measure of the strict superlevel set {h > alpha}."""
    return float(_node_weights(h.grid)[h.values.reshape(-1) > alpha].sum())


def sublevel_cellset(h: GridFunction, alpha: float) -> CellSet:
    """Cells of the finest mesh on which h <= alpha at every node, as a closed set."""
    grid = h.grid
    cells = grid.cells_per_axis
    shape = []
    for n in grid.nodes_per_cell:
        shape.extend((cells, n))
    per_cell = h.values.reshape(shape)
    ok = per_cell <= alpha
    for axis in reversed(range(1, 2 * grid.d, 2)):
        ok = ok.all(axis=axis)
    return CellSet(grid.level, ok, closed=True)


@dataclass
class WhitneyDecomposition:
    """Disjoint dyadic cubes whose closures fill the open complement of a cell set.

    cubes are uniform-level dyadic cubes, listed in acceptance order (level
    by level, lexicographic within a level); cube_dist[r] is the Euclidean
    distance from cubes[r] to the closed set.  The construction is truncated
    at the mesh resolution, so a sliver of the complement along the boundary
    of the closed set can stay uncovered; its exact measure is reported, and
    stays below residual_bound() for any input.
    """

    resolution: int
    d: int
    base_level: int | None
    cubes: list[DyadicCube] = field(default_factory=list)
    cube_dist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual_measure: Fraction = Fraction(0)
    boundary_cells: int = 0

    def residual_bound(self) -> Fraction:
        return 2 * self.boundary_cells * Fraction(1, 2 ** self.resolution)

    def dump(self) -> str:
        """One cube per line: level then the position indices, for plotting."""
        lines = [f"{q.level[0]} " + " ".join(str(v) for v in q.pos) for q in self.cubes]
        return "\n".join(lines) + ("\n" if lines else "")


def _scaled_dist2(lo: np.ndarray, hi: np.ndarray, cells: np.ndarray,
                  side: int, surround: bool) -> np.ndarray:
    """Squared distance, in units of the finest cell width, from boxes to the cell set.

    lo, hi: (m, d) integer corners at scale 2^-K; cells: (n, d) marked cell
    indices.  Exact integer arithmetic throughout.
    """
    best = None
    if surround:
        ext = np.minimum(lo, side - hi).min(axis=1)
        best = ext * ext
    if len(cells):
        gap = np.maximum(np.maximum(cells[None, :, :] - hi[:, None, :],
                                    lo[:, None, :] - cells[None, :, :] - 1), 0)
        d2 = (gap * gap).sum(axis=2).min(axis=1)
        best = d2 if best is None else np.minimum(best, d2)
    if best is None:
        raise ValueError("empty closed set: distances are undefined")
    return best


def whitney(F: CellSet, *, surround: bool = True) -> WhitneyDecomposition:
    """Greedy dyadic Whitney decomposition of the open complement of F.

    Base level: the smallest k such that some level-k cube inside the unit
    cube keeps a distance to F strictly greater than sqrt(d) 2^-k.  From
    there down to the mesh resolution, cubes satisfying the same strict
    margin are accepted in lexicographic order whenever no ancestor was
    accepted before; accepted cubes are pairwise disjoint as open boxes and
    each satisfies diam Q < dist(Q, F) <= 4 diam Q up to one cell width.

    surround=True treats everything outside the unit cube as part of F,
    which keeps the complement's measure finite; with surround=False an
    empty F is rejected since no base level exists.
    """
    if not F.closed:
        raise ValueError("whitney expects the closed cell set, got an open one")
    d, K = F.d, F.resolution
    side = 2 ** K
    cells = np.argwhere(F.mask).astype(np.int64)
    if not surround and len(cells) == 0:
        raise ValueError("empty closed set: no base level exists")
    w_mask = ~F.mask

    # boundary cells of the complement: within sqrt(d) 2^-K of F
    boundary = 0
    if w_mask.any():
        w_cells = np.argwhere(w_mask).astype(np.int64)
        d2 = _scaled_dist2(w_cells, w_cells + 1, cells, side, surround)
        boundary = int((d2 <= d).sum())

    dec = WhitneyDecomposition(resolution=K, d=d, base_level=None,
                               boundary_cells=boundary)
    if not w_mask.any():
        return dec

    covered = np.zeros_like(w_mask)
    accepted_at: dict[int, set[tuple[int, ...]]] = {}
    dists: list[float] = []

    for k in range(K + 1):
        scale = 2 ** (K - k)
        nus = np.indices((2 ** k,) * d).reshape(d, -1).T.astype(np.int64)
        lo = nus * scale
        d2 = _scaled_dist2(lo, lo + scale, cells, side, surround)
        good = d2 > d * scale * scale  # strict: dist > sqrt(d) 2^-k exactly
        if dec.base_level is None:
            if not good.any():
                continue
            dec.base_level = k
        level_set: set[tuple[int, ...]] = set()
        for idx in np.flatnonzero(good):
            nu = tuple(int(v) for v in nus[idx])
            if any(tuple(v >> (k - m) for v in nu) in taken
                   for m, taken in accepted_at.items()):
                continue
            level_set.add(nu)
            dec.cubes.append(DyadicCube((k,) * d, nu))
            dists.append(math.sqrt(float(d2[idx])) / side)
            covered[tuple(slice(v * scale, (v + 1) * scale) for v in nu)] = True
        if level_set:
            accepted_at[k] = level_set
        if not (w_mask & ~covered).any():
            break

    dec.cube_dist = np.array(dists)
    dec.residual_measure = int((w_mask & ~covered).sum()) * Fraction(1, side ** d)
    return dec


@dataclass
class CZSplit:
    """Good/bad splitting of a grid function at a height alpha.

    g agrees with f off the Whitney cubes and equals the cube average of f
    on each of them; every bad block h_r = (f - avg) chi_Q has quadrature
    mean zero, and f = g + sum h_r holds node by node.
    """

    g: GridFunction
    bad_blocks: list[tuple[DyadicCube, GridFunction]]

    def reconstruct(self) -> GridFunction:
        out = self.g.values.copy()
        for _, h in self.bad_blocks:
            out += h.values
        return GridFunction(self.g.grid, out)


def cz_split(f: GridFunction, alpha: float) -> tuple[CellSet, WhitneyDecomposition, CZSplit]:
    """Calderon-Zygmund splitting of f at height alpha.

    F collects the cells where the maximal function stays <= alpha at every
    node; the complement is tiled by Whitney cubes; on each cube f is
    replaced by its average to form g, the remainders become the mean-zero
    bad blocks.  Large alpha gives the degenerate split g = f with no bad
    blocks.  Cells of the complement missed by the truncated cube family
    keep their f values in g, so the splitting identity holds everywhere.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    grid = f.grid
    F = sublevel_cellset(maximal_function(f), alpha)
    dec = whitney(F)
    weights = _node_weights(grid).reshape(grid.shape)
    g = f.values.copy()
    blocks: list[tuple[DyadicCube, GridFunction]] = []
    for cube in dec.cubes:
        sel = grid.cube_slices(cube)
        w = weights[sel]
        avg = float((w * f.values[sel]).sum() / w.sum())
        h = np.zeros(grid.shape)
        h[sel] = f.values[sel] - avg
        g[sel] = avg
        blocks.append((cube, GridFunction(grid, h)))
    return F, dec, CZSplit(GridFunction(grid, g), blocks)


def cz_constants(f: GridFunction, alpha: float) -> dict:
    """Empirical constants of the splitting at one height, for regression baselines.

    Ratios are normalized so the classical statements read bound <= constant:
    weak (1,1) level-set measure, complement measure, sup and squared L_2
    size of the good part, and the largest cube average of |f|.
    """
    Mf = maximal_function(f)
    F, dec, split = cz_split(f, alpha)
    l1 = f.lp_norm(1.0)
    absf = GridFunction(f.grid, np.abs(f.values))
    avg_max = 0.0
    for cube in dec.cubes:
        sel = f.grid.cube_slices(cube)
        w = _node_weights(f.grid).reshape(f.grid.shape)[sel]
        avg_max = max(avg_max, float((w * absf.values[sel]).sum() / w.sum()))
    return {
        "weak11": level_set_measure(Mf, alpha) * alpha / l1,
        "complement_measure": float(F.complement().measure()) * alpha / l1,
        "good_sup": float(np.max(np.abs(split.g.values))) / alpha,
        "good_l2": split.g.lp_norm(2.0) ** 2 / (alpha * l1),
        "block_average": avg_max / alpha,
        "cube_count": len(dec.cubes),
        "residual": float(dec.residual_measure),
    }
