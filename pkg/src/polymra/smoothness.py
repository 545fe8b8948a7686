"""Mixed differences, moduli of continuity, and dominating-mixed-smoothness seminorms.

Differences use cell-commensurate steps only, so shifted nodes land on
nodes and restricted domains are unions of whole cells; the modulus is a
max over that finite family of steps, which makes it a one-sided (lower)
surrogate of the continuum supremum.  Seminorm integrals are discretized on
the dyadic scale grid t = 2^-m with the modulus frozen per dyadic block,
plus the closed-form tail over t > 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, grid_for, lp_norm
from .lp_analysis import detail_components
from .projectors import analyze

__all__ = [
    "SmoothnessParams",
    "ModulusTable",
    "mixed_difference",
    "mixed_modulus",
    "modulus_table",
    "besov_seminorm",
    "decay_check",
    "synthesize_extremal",
]


@dataclass(frozen=True)
class SmoothnessParams:
    """Class parameters: per-axis smoothness alpha, integrability p, summation theta.

    The difference order along axis j is the smallest integer exceeding
    alpha_j, so alpha_j < l_j <= alpha_j + 1 always holds.
    """

    alpha: tuple[float, ...]
    p: float = 2.0
    theta: float = math.inf

    def __post_init__(self):
        alpha = tuple(float(a) for a in np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        if not alpha or any(a <= 0 for a in alpha):
            raise ValueError(f"alpha must be positive componentwise, got {self.alpha}")
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 1 <= self.theta:
            raise ValueError(f"theta must be in [1, inf], got {self.theta}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def l(self) -> tuple[int, ...]:
        return tuple(int(math.floor(a)) + 1 for a in self.alpha)


def _float_vec(value, d: int, name: str) -> tuple[float, ...]:
    if np.isscalar(value):
        return (float(value),) * d
    out = tuple(float(v) for v in value)
    if len(out) != d:
        raise ValueError(f"{name} must have length {d}, got {out}")
    return out


def _order_vec(value, d: int) -> tuple[int, ...]:
    if np.isscalar(value):
        out = (int(value),) * d
    else:
        out = tuple(int(v) for v in value)
    if len(out) != d or any(v < 0 for v in out):
        raise ValueError(f"difference orders must be >= 0 and length {d}, got {value}")
    return out


def _axis_difference(values: np.ndarray, grid: Grid, axis: int, order: int,
                     shift: int) -> np.ndarray:
    """Finite difference of one axis with a whole-cell step, zero off its domain."""
    if order == 0:
        return values
    if shift == 0:
        return np.zeros_like(values)
    cells = grid.cells_per_axis
    span = order * abs(shift)
    if span >= cells:
        return np.zeros_like(values)
    n = grid.nodes_per_cell[axis]
    count = cells - span
    base = 0 if shift > 0 else span
    out = np.zeros_like(values)
    dest = [slice(None)] * values.ndim
    dest[axis] = slice(base * n, (base + count) * n)
    dest = tuple(dest)
    for k in range(order + 1):
        w = (-1) ** (order - k) * math.comb(order, k)
        lo = (base + k * shift) * n
        src = [slice(None)] * values.ndim
        src[axis] = slice(lo, lo + count * n)
        out[dest] += w * values[tuple(src)]
    return out


def mixed_difference(f: GridFunction, h, l) -> GridFunction:
    """Tensor-product finite difference with steps h and per-axis orders l.

    Steps snap to the nearest whole number of finest cells.  The result is
    zero outside the restricted domain where every shifted point stays in
    the cube; an empty domain gives the zero function.
    """
    grid = f.grid
    hv = _float_vec(h, grid.d, "h")
    lv = _order_vec(l, grid.d)
    out = f.values
    for axis in range(grid.d):
        shift = int(round(hv[axis] * grid.cells_per_axis))
        out = _axis_difference(out, grid, axis, lv[axis], shift)
    if out is f.values:
        out = out.copy()
    return GridFunction(grid, out)


def _fill_norms(values: np.ndarray, grid: Grid, l: tuple[int, ...], p: float,
                axes: tuple[int, ...], smax: tuple[int, ...], out: np.ndarray) -> None:
    axis = axes[0]
    for s in range(1, smax[0] + 1):
        diff = _axis_difference(values, grid, axis, l[axis], s)
        if len(axes) == 1:
            out[s - 1] = lp_norm(GridFunction(grid, diff), p)
        else:
            _fill_norms(diff, grid, l, p, axes[1:], smax[1:], out[s - 1])


def _resolve_axes(axes, d: int) -> tuple[int, ...]:
    if axes is None:
        return tuple(range(d))
    out = tuple(sorted(int(a) for a in axes))
    if not out or len(set(out)) != len(out) or out[0] < 0 or out[-1] >= d:
        raise ValueError(f"axes must be a nonempty subset of 0..{d - 1}, got {axes}")
    return out


def mixed_modulus(f: GridFunction, t, l, p: float, axes=None) -> float:
    """Mixed modulus of continuity: max difference norm over steps |h_j| <= t_j.

    Differences run along the given axes (all of them by default) with the
    orders l; steps range over every whole-cell value up to t_j.  Negative
    steps add nothing: they mirror the restricted domain and leave the norm
    unchanged.  A t_j below one cell width leaves no resolvable step and
    gives 0.
    """
    grid = f.grid
    J = _resolve_axes(axes, grid.d)
    tv = _float_vec(t, len(J), "t")
    if any(tj <= 0 for tj in tv):
        raise ValueError(f"t must be positive, got {t}")
    lv = _order_vec(l, grid.d)
    smax = tuple(int(math.floor(tj * grid.cells_per_axis + 1e-9)) for tj in tv)
    if any(s == 0 for s in smax):
        return 0.0
    norms = np.zeros(smax)
    _fill_norms(f.values, grid, lv, p, J, smax, norms)
    return float(norms.max())


@dataclass(frozen=True)
class ModulusTable:
    """Modulus values on the dyadic scale grid t_j = 2^-m, m = 0..K, per axis in J.

    values[m_1, ..., m_|J|] is the modulus at t = (2^-m_1, ...); it is
    nonincreasing as any m grows and, for continuous inputs, decays to 0.
    """

    axes: tuple[int, ...]
    scales: tuple[float, ...]
    values: np.ndarray


def modulus_table(f: GridFunction, l, p: float, axes=None) -> ModulusTable:
    """Modulus of continuity tabulated over all dyadic scale vectors at once."""
    grid = f.grid
    J = _resolve_axes(axes, grid.d)
    lv = _order_vec(l, grid.d)
    cells = grid.cells_per_axis
    norms = np.zeros((cells,) * len(J))
    _fill_norms(f.values, grid, lv, p, J, (cells,) * len(J), norms)
    for axis in range(norms.ndim):
        norms = np.maximum.accumulate(norms, axis=axis)
    K = grid.level
    idx = np.array([2 ** (K - m) - 1 for m in range(K + 1)])
    table = norms[np.ix_(*([idx] * len(J)))]
    scales = tuple(2.0 ** -m for m in range(K + 1))
    return ModulusTable(axes=J, scales=scales, values=table)


def _log_block_weights(alpha: float, theta: float, count: int) -> np.ndarray:
    """Log of the per-axis scale weights: integral of t^(-1-theta*alpha) per block.

    The modulus value at t = 2^-m is frozen over the block [2^-m, 2^-m+1]
    whose integral concentrates there for large theta, so the seminorm
    converges to the sup form as theta grows; m = 0 carries the whole tail
    t > 1, where the modulus is constant.  Freezing at the lower endpoint
    keeps the discretization a lower estimate of the true integral.  The
    part below the finest scale is dropped: the grid cannot resolve it.
    """
    c = theta * alpha
    m = np.arange(count, dtype=float)
    out = m * c * math.log(2.0) + math.log1p(-(2.0 ** -c)) - math.log(c)
    out[0] = -math.log(c)
    return out


def besov_seminorm(f: GridFunction, params: SmoothnessParams) -> float:
    """Discretized mixed-smoothness seminorm: the worst nonempty axis subset.

    theta = inf takes the sup of 2^(m, alpha) * modulus over the dyadic
    scale grid; finite theta sums modulus^theta against the exact block
    integrals of the scale weight, evaluated in log space so huge theta
    stays finite.
    """
    grid = f.grid
    if len(params.alpha) != grid.d:
        raise ValueError(f"params dimension {len(params.alpha)} != grid d={grid.d}")
    best = 0.0
    for r in range(1, grid.d + 1):
        for J in itertools.combinations(range(grid.d), r):
            table = modulus_table(f, params.l, params.p, axes=J).values
            m_axes = np.meshgrid(*[np.arange(table.shape[0])] * len(J), indexing="ij")
            if math.isinf(params.theta):
                scale = np.zeros(table.shape)
                for mj, j in zip(m_axes, J):
                    scale = scale + mj * params.alpha[j] * math.log(2.0)
                val = float(np.max(np.exp(scale) * table, initial=0.0))
            else:
                logw = np.zeros(table.shape)
                for mj, j in zip(m_axes, J):
                    w = _log_block_weights(params.alpha[j], params.theta, table.shape[0])
                    logw = logw + w[mj]
                pos = table > 0
                if not pos.any():
                    val = 0.0
                else:
                    terms = params.theta * np.log(table[pos]) + logw[pos]
                    top = terms.max()
                    val = math.exp((top + math.log(np.exp(terms - top).sum())) / params.theta)
            best = max(best, val)
    return best


def decay_check(f: GridFunction, params: SmoothnessParams, q: float) -> dict:
    """Per-block norm against the smoothness decay rate.

    For every nonzero multi-level of the full box the ratio
    ||detail block||_q / 2^-(kappa, alpha - (1/p - 1/q)_+ e) is returned;
    for a function of unit class seminorm these stay uniformly bounded.
    """
    grid = f.grid
    if len(params.alpha) != grid.d:
        raise ValueError(f"params dimension {len(params.alpha)} != grid d={grid.d}")
    degrees = tuple(lj - 1 for lj in params.l)
    dec = analyze(f, ("box", (grid.level,) * grid.d), degrees)
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    shift = max(0.0, 1.0 / params.p - inv_q)
    out = {}
    for kappa, gk in detail_components(dec).items():
        if all(k == 0 for k in kappa):
            continue
        expo = sum(k * (a - shift) for k, a in zip(kappa, params.alpha))
        out[kappa] = lp_norm(gk, q) / 2.0 ** -expo
    return out


def synthesize_extremal(params: SmoothnessParams, level: int, seed) -> GridFunction:
    """Random function with exact extremal block decay 2^-(kappa, alpha) in L_p.

    Every detail block of the full box is drawn at random and rescaled so
    its L_p norm hits the decay profile exactly; block orthogonality keeps
    the profile intact in the sum.  The hard input for width experiments.
    """
    d = len(params.alpha)
    degrees = tuple(lj - 1 for lj in params.l)
    grid = grid_for(d, degree=degrees, level=level)
    rng = np.random.default_rng(seed)
    noise = GridFunction(grid, rng.standard_normal(grid.shape))
    dec = analyze(noise, ("box", (level,) * d), degrees)
    out = np.zeros(grid.shape)
    for kappa, gk in detail_components(dec).items():
        nrm = lp_norm(gk, params.p)
        if nrm == 0.0:
            raise ValueError(f"degenerate random draw: block {kappa} vanished")
        target = 2.0 ** -sum(k * a for k, a in zip(kappa, params.alpha))
        out += (target / nrm) * gk.values
    return GridFunction(grid, out)
