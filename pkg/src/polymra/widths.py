"""Hyperbolic-cross truncation budgets and approximation-rate experiments.

The cross subspace keeps every detail block with (kappa, beta) <= r.  For
functions with extremal block decay the discarded tail follows a power law
in the subspace dimension, up to logarithms.  This module builds the weight
vector beta, measures truncation errors, allocates per-block budgets over
the shells beyond the cross, and fits empirical rates against the model
exponents.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import detail_dim
from .grid import GridFunction, lp_norm
from .indexing import cross_contains, enum_box, enum_cross, enum_shell, min_multiplicity
from .projectors import Decomposition, analyze, synthesize
from .smoothness import SmoothnessParams, synthesize_extremal

__all__ = [
    "WidthExperimentConfig",
    "BudgetPlan",
    "choose_beta",
    "truncation_error",
    "tail_model",
    "tail_bound_check",
    "budget_plan",
    "width_model_exponents",
    "width_experiment",
    "rate_fit",
]

_REL_TOL = 1e-12


def _inv(q: float) -> float:
    return 0.0 if math.isinf(q) else 1.0 / q


def choose_beta(params: SmoothnessParams, q: float) -> tuple[float, ...]:
    """Cross weights: 1 on the slots of minimal smoothness, midpoints above.

    The admissible range for a non-minimal slot j is the open interval
    1 < beta_j < (alpha_j - s) / min(alpha - s) with s = (1/p - 1/q)_+; any
    interior choice keeps the tail decay governed by the minimal slots, and
    the midpoint makes the choice deterministic.
    """
    alpha = params.alpha
    s = max(0.0, _inv(params.p) - _inv(q))
    shifted = tuple(a - s for a in alpha)
    m = min(shifted)
    if m <= 0.0:
        raise ValueError(
            f"effective smoothness must stay positive, min(alpha) - (1/p - 1/q)_+ = {m}"
        )
    lo = min(alpha)
    beta = []
    for a, sh in zip(alpha, shifted):
        if a <= lo * (1.0 + _REL_TOL):
            beta.append(1.0)
        else:
            beta.append((1.0 + sh / m) / 2.0)
    return tuple(beta)


def _infer_degrees(grid) -> tuple[int, ...]:
    # grids are built with 2*degree + 2 nodes per cell, so this inverts grid_for
    return tuple(n // 2 - 1 for n in grid.nodes_per_cell)


def truncation_error(f: GridFunction, beta, r, q: float, degrees=None) -> tuple[float, int]:
    """L_q error of dropping every block outside the cross, and the cross dimension.

    The error is measured within the resolution of f's grid; the dimension
    counts the whole cross subspace with no resolution cap, so it can exceed
    what the grid resolves.
    """
    grid = f.grid
    beta = tuple(float(b) for b in beta)
    if len(beta) != grid.d:
        raise ValueError(f"beta must have length {grid.d}, got {beta}")
    if r < 1:
        raise ValueError(f"cross radius must be >= 1, got {r}")
    degrees = _infer_degrees(grid) if degrees is None else tuple(int(x) for x in degrees)
    n = sum(detail_dim(kappa, degrees) for kappa in enum_cross(beta, r))
    dec = analyze(f, ("box", (grid.level,) * grid.d), degrees)
    dropped = {
        kappa: blk for kappa, blk in dec.blocks.items() if not cross_contains(kappa, beta, r)
    }
    if not dropped:
        return 0.0, n
    if q == 2.0:
        err = math.sqrt(sum(blk.l2_norm() ** 2 for blk in dropped.values()))
        return err, n
    tail = synthesize(
        Decomposition(grid=grid, degrees=dec.degrees, index_set=dec.index_set, blocks=dropped)
    )
    return lp_norm(tail, q), n


def tail_model(params: SmoothnessParams, q: float, r) -> float:
    """Model tail size at cross radius r: a power of 2^-r times a power of r."""
    alpha = params.alpha
    p = params.p
    c = min_multiplicity(alpha)
    if p <= q:
        rate = min(a - (_inv(p) - _inv(q)) for a in alpha)
        star = min(2.0, q)
    else:
        rate = min(alpha)
        star = min(2.0, p)
    log_power = (c - 1) * max(0.0, 1.0 / star - _inv(params.theta))
    return 2.0 ** (-rate * float(r)) * float(r) ** log_power


def tail_bound_check(f: GridFunction, beta, r, params: SmoothnessParams, q: float) -> float:
    """Measured truncation error over its model size; bounded for unit-class f."""
    degrees = tuple(l - 1 for l in params.l)
    err, _ = truncation_error(f, beta, r, q, degrees=degrees)
    return err / tail_model(params, q, r)


@dataclass(frozen=True)
class BudgetPlan:
    """Per-block budget beyond the cross, with its free constants and totals."""

    r: int
    j0: int
    gamma: float
    gamma_prime: float
    epsilon: float
    c0: int
    cross_dim: int
    allocation: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.cross_dim + sum(self.allocation.values())


def budget_plan(r, beta, params: SmoothnessParams, q: float) -> BudgetPlan:
    """Block budgets n_kappa over the shells r < (kappa, beta) <= r + j0.

    Applies when q >= max(2, p) and every alpha_j stays positive after
    subtracting 1/p + (1/2 - 1/p)_+.  The free constants are fixed at the
    midpoints of their admissible open intervals, resolved in dependency
    order: eps from the beta margins (eps = mu when every slot is minimal
    and no margin constrains it), gamma from its three conditions, then
    gamma_prime below min(gamma, 2 eps).
    """
    r = int(r)
    if r < 1:
        raise ValueError(f"cross radius must be >= 1, got {r}")
    alpha = params.alpha
    p = params.p
    d = len(alpha)
    beta = tuple(float(b) for b in beta)
    if len(beta) != d:
        raise ValueError(f"beta must have length {d}, got {beta}")
    if q < max(2.0, p):
        raise ValueError(f"budget case needs q >= max(2, p), got q={q} with p={p}")
    cut = _inv(p) + max(0.0, 0.5 - _inv(p))
    base = tuple(a - cut for a in alpha)
    mu = min(base)
    if mu <= 0.0:
        raise ValueError(f"budget case needs alpha - (1/p + (1/2 - 1/p)_+) > 0, margin {mu}")
    lo = min(alpha)
    minimal = [j for j in range(d) if alpha[j] <= lo * (1.0 + _REL_TOL)]
    others = [j for j in range(d) if alpha[j] > lo * (1.0 + _REL_TOL)]
    for j in minimal:
        if beta[j] != 1.0:
            raise ValueError(f"beta must equal 1 on minimal slots, got beta[{j}]={beta[j]}")
    margins = []
    for j in others:
        if beta[j] <= 1.0:
            raise ValueError(f"beta must exceed 1 off minimal slots, got beta[{j}]={beta[j]}")
        margins.append(base[j] / beta[j] - mu)
    if margins and min(margins) <= 0.0:
        raise ValueError("beta leaves no budget margin: base smoothness over beta hit the minimum")
    epsilon = min(margins) / 2.0 if margins else mu
    m_narrow = min(a - max(0.0, _inv(p) - _inv(q)) for a in alpha)
    m_wide = min(a - max(0.0, _inv(p) - 0.5) for a in alpha)
    caps = [1.0 / 3.0, 2.0 * mu]
    if m_wide > m_narrow * (1.0 + _REL_TOL):
        caps.append(m_narrow / (3.0 * (m_wide - m_narrow)))
    gamma = min(caps) / 2.0
    gamma_prime = min(gamma, 2.0 * epsilon) / 2.0
    degrees = tuple(l - 1 for l in params.l)
    c0 = math.prod(params.l)
    j0 = math.floor(r / (3.0 * gamma))
    allocation = {}
    for j in range(1, j0 + 1):
        for kappa in enum_shell(beta, r + j):
            cap = detail_dim(kappa, degrees)
            off = sum(kappa[i] * beta[i] for i in others)
            raw = c0 * 2.0 ** (r - gamma * j - gamma_prime * off)
            allocation[kappa] = min(math.floor(raw) + 1, cap)
    cross_dim = sum(detail_dim(kappa, degrees) for kappa in enum_cross(beta, r))
    return BudgetPlan(
        r=r,
        j0=j0,
        gamma=gamma,
        gamma_prime=gamma_prime,
        epsilon=epsilon,
        c0=c0,
        cross_dim=cross_dim,
        allocation=allocation,
    )


def width_model_exponents(params: SmoothnessParams, q: float) -> tuple[float, float]:
    """Exponents (power of 1/n, power of log n) of the width decay model."""
    alpha = params.alpha
    p = params.p
    c = min_multiplicity(alpha)
    rate = min(a - max(0.0, _inv(p) - _inv(q)) for a in alpha)
    blend = min(2.0, max(p, q))
    log_power = (rate + max(0.0, 1.0 / blend - _inv(params.theta))) * (c - 1)
    return rate, log_power


@dataclass(frozen=True)
class WidthExperimentConfig:
    """One truncation-rate experiment: class parameters, target norm, radii."""

    params: SmoothnessParams
    q: float = 2.0
    level: int = 6
    r_values: tuple[int, ...] = (4, 5, 6, 7, 8, 9, 10)
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        rs = tuple(int(r) for r in self.r_values)
        if not rs or rs[0] < 1 or list(rs) != sorted(set(rs)):
            raise ValueError(f"r_values must be increasing positive ints, got {self.r_values}")
        object.__setattr__(self, "r_values", rs)

    def condition_margin(self) -> float:
        """min(alpha) - (1/p - 1/q)_+; the rate model applies iff positive."""
        return min(self.params.alpha) - max(0.0, _inv(self.params.p) - _inv(self.q))

    def digest(self) -> str:
        key = (
            self.params.alpha,
            self.params.p,
            self.params.theta,
            self.q,
            self.level,
            self.r_values,
            self.trials,
            self.seed,
        )
        return hashlib.sha1(repr(key).encode()).hexdigest()[:12]


def _profile_tail_sq(alpha, beta, r, level: int) -> float:
    """Squared L2 remainder of the exact decay profile below the grid resolution.

    Closed form: the lattice sum of 4^-(kappa, alpha) factorizes into
    geometric series per axis; subtracting the in-cross part and the
    resolved out-of-cross part leaves the sub-resolution tail.
    """
    full = 1.0
    for a in alpha:
        full *= 1.0 / (1.0 - 4.0 ** -a)
    resolved = 0.0
    inside = 0.0
    for kappa in enum_box((level,) * len(alpha)):
        term = 4.0 ** -sum(k * a for k, a in zip(kappa, alpha))
        if cross_contains(kappa, beta, r):
            inside += term
        else:
            resolved += term
    for kappa in enum_cross(beta, r):
        if any(k > level for k in kappa):
            inside += 4.0 ** -sum(k * a for k, a in zip(kappa, alpha))
    return max(0.0, full - inside - resolved)


def width_experiment(config: WidthExperimentConfig) -> list[dict]:
    """Truncation errors of extremal-profile functions across cross radii.

    Rows carry the config digest, the radius, the exact cross dimension, the
    measured error, the model width value and their ratio.  With p = q = 2
    the sub-resolution remainder of the profile is added in closed form, so
    the reported error does not depend on the grid level; other exponents
    report the within-resolution error.
    """
    params = config.params
    if config.condition_margin() <= 0.0:
        raise ValueError("width model needs min(alpha) > (1/p - 1/q)_+")
    beta = choose_beta(params, config.q)
    degrees = tuple(l - 1 for l in params.l)
    power, log_power = width_model_exponents(params, config.q)
    complete = params.p == 2.0 and config.q == 2.0
    profiles = [
        synthesize_extremal(params, config.level, config.seed + t) for t in range(config.trials)
    ]
    rows = []
    for r in config.r_values:
        errs = []
        n = 0
        for f in profiles:
            err, n = truncation_error(f, beta, r, config.q, degrees=degrees)
            if complete:
                err = math.sqrt(err**2 + _profile_tail_sq(params.alpha, beta, r, config.level))
            errs.append(err)
        err = float(np.mean(errs))
        model = float(n) ** -power * math.log(float(n)) ** log_power
        rows.append(
            {
                "config": config.digest(),
                "r": int(r),
                "n": int(n),
                "error": err,
                "model": model,
                "ratio": err / model,
            }
        )
    return rows


def rate_fit(points) -> tuple[float, float]:
    """Least-squares exponents of error ~ n^slope (log n)^coef from (n, error) pairs.

    Needs at least 4 points with n strictly increasing and above 1 and with
    positive errors; returns the slope on log n and the coefficient on
    log log n.
    """
    pts = [(float(n), float(e)) for n, e in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points, got {len(pts)}")
    ns = np.array([n for n, _ in pts])
    es = np.array([e for _, e in pts])
    if np.any(ns <= 1.0) or np.any(np.diff(ns) <= 0.0):
        raise ValueError("sample sizes must be strictly increasing and above 1")
    if np.any(es <= 0.0):
        raise ValueError("errors must be strictly positive")
    design = np.column_stack([np.log(ns), np.log(np.log(ns)), np.ones(len(pts))])
    sol, _, rank, _ = np.linalg.lstsq(design, np.log(es), rcond=None)
    if rank < 3:
        raise ValueError("degenerate fit: design matrix is rank deficient")
    return float(sol[0]), float(sol[1])
