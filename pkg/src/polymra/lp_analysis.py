"""Square function, sign series, and the Rademacher system.

Empirical side of the two-sided square-function equivalence: everything here
either evaluates an exact discrete object (Rademacher sums are piecewise
constant on a known dyadic partition) or produces ratio statistics whose
boundedness across resolution levels is the falsifiable claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .grid import Grid, GridFunction, lp_norm
from .projectors import (
    Decomposition,
    DetailCoeffs,
    analyze,
    project_level,
    synthesize,
)

__all__ = [
    "SignFamily",
    "LPReport",
    "random_resolved",
    "detail_components",
    "square_function",
    "lp_equivalence",
    "sign_series",
    "pstar_ratio",
    "rademacher_eval",
    "khintchine_check",
    "lp_report",
]


def _check_p_open(p: float) -> float:
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError(f"p must lie in (1, infinity), got {p}")
    return p


@dataclass(frozen=True)
class SignFamily:
    """Product-form signs sigma_kappa = prod_j sigma^j_(kappa_j).

    One sign sequence per axis; this is exactly the structure the sign-series
    invariance needs. Arbitrary per-block sign maps are accepted by
    sign_series too, but they sit outside the product hypothesis.
    """

    axis_signs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "axis_signs", tuple(tuple(int(s) for s in row) for row in self.axis_signs)
        )
        for row in self.axis_signs:
            if any(s not in (-1, 1) for s in row):
                raise ValueError("signs must be +1 or -1")

    @property
    def d(self) -> int:
        return len(self.axis_signs)

    def sigma(self, kappa: Sequence[int]) -> int:
        out = 1
        for j, k in enumerate(kappa):
            out *= self.axis_signs[j][k]
        return out

    @classmethod
    def random(cls, k: Sequence[int], rng: np.random.Generator) -> "SignFamily":
        rows = tuple(
            tuple(int(s) for s in rng.choice((-1, 1), size=int(kj) + 1)) for kj in k
        )
        return cls(axis_signs=rows)


def random_resolved(grid: Grid, k, degrees, rng: np.random.Generator) -> GridFunction:
    """Random element of the level-k piecewise polynomial space (unit-variance coefficients)."""
    noise = grid.function(rng.standard_normal(grid.shape))
    return project_level(noise, k, degrees).to_grid()


def detail_components(dec: Decomposition) -> dict[tuple[int, ...], GridFunction]:
    """Each block of a decomposition synthesized on its own."""
    out = {}
    for kappa, block in dec.blocks.items():
        single = Decomposition(
            grid=dec.grid,
            degrees=dec.degrees,
            index_set=("custom", (kappa,)),
            blocks={kappa: block},
        )
        out[kappa] = synthesize(single)
    return out


def square_function(dec: Decomposition) -> GridFunction:
    """Pointwise l2 norm across blocks: sqrt(sum_kappa (detail_kappa(x))^2)."""
    acc = np.zeros(dec.grid.shape)
    for part in detail_components(dec).values():
        acc += part.values ** 2
    return GridFunction(dec.grid, np.sqrt(acc))


def lp_equivalence(f: GridFunction, p: float, k, degrees) -> float:
    """Ratio of the square-function L_p norm to the function's L_p norm.

    The input is replaced by its level-k projection first, so both sides live
    in the resolved space; at p=2 the ratio is identically 1.
    """
    p = _check_p_open(p)
    dec = analyze(f, ("box", k), degrees)
    resolved = synthesize(dec)
    denom = lp_norm(resolved, p)
    if denom == 0.0:
        raise ValueError("zero function has no norm ratio")
    return lp_norm(square_function(dec), p) / denom


def _signed(dec: Decomposition, signs) -> Decomposition:
    blocks = {}
    for kappa, block in dec.blocks.items():
        s = signs.sigma(kappa) if isinstance(signs, SignFamily) else signs[kappa]
        if s not in (-1, 1):
            raise ValueError(f"sign for block {kappa} must be +1 or -1, got {s}")
        blocks[kappa] = DetailCoeffs(
            kappa=kappa, degrees=block.degrees, coeffs=s * block.coeffs
        )
    return Decomposition(
        grid=dec.grid, degrees=dec.degrees, index_set=dec.index_set, blocks=blocks
    )


def sign_series(f: GridFunction, signs, p: float, k, degrees) -> float:
    """L_p norm of the sign-modulated detail series sum sigma_kappa E_kappa f over the box k.

    signs is a SignFamily (the theorem's product structure) or any mapping
    kappa -> +-1; mappings without product structure are outside the theorem
    hypotheses but computed all the same.
    """
    p = _check_p_open(p)
    dec = analyze(f, ("box", k), degrees)
    return lp_norm(synthesize(_signed(dec, signs)), p)


def pstar_ratio(f: GridFunction, p: float, k, degrees) -> float:
    """Ratio of the function norm to the blockwise lp-of-norms aggregate.

    Returns ||f_k||_p / (sum_kappa ||detail_kappa||_p^(p*))^(1/p*)
    with p* = min(2, p); the numerator uses the level-k projection of f.
    """
    p = float(p)
    if not 1.0 <= p < math.inf:
        raise ValueError(f"p must lie in [1, infinity), got {p}")
    pstar = min(2.0, p)
    dec = analyze(f, ("box", k), degrees)
    parts = detail_components(dec)
    agg = sum(lp_norm(g, p) ** pstar for g in parts.values()) ** (1.0 / pstar)
    if agg == 0.0:
        raise ValueError("zero function has no norm ratio")
    return lp_norm(synthesize(dec), p) / agg


# ---------------------------------------------------------------------------
# Rademacher system


def rademacher_eval(kappa: Sequence[int], t) -> int:
    """Sign of the tensor Rademacher function at a point, by dyadic position.

    The axis factor at level k is +1 on even cells of the level-(k+1) dyadic
    partition and -1 on odd ones; no trigonometry is involved. Points on a
    cell boundary are rejected.
    """
    kappa = tuple(int(k) for k in kappa)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if len(kappa) != len(t):
        raise ValueError("kappa and the point must have the same dimension")
    sign = 1
    for k, tj in zip(kappa, t):
        if k < 0:
            raise ValueError(f"levels must be >= 0, got {kappa}")
        if not 0.0 < tj < 1.0:
            raise ValueError(f"point coordinate {tj} outside the open unit interval")
        u = tj * 2.0 ** (k + 1)
        cell = math.floor(u)
        if u == cell:
            raise ValueError(f"coordinate {tj} is a dyadic breakpoint at level {k}")
        if cell % 2:
            sign = -sign
    return sign


def _axis_sign_table(k_axis: int, box_axis: int) -> np.ndarray:
    """Signs of omega_k on the cells of the level-(box_axis+1) partition, k <= box_axis."""
    cells = np.arange(2 ** (box_axis + 1))
    table = np.empty((k_axis + 1, len(cells)))
    for k in range(k_axis + 1):
        table[k] = 1.0 - 2.0 * ((cells >> (box_axis - k)) & 1)
    return table


def khintchine_check(a, p: float) -> tuple[float, float, float]:
    """Exact L_p norm of a Rademacher polynomial against its l2 coefficient norm.

    a is the coefficient array over a box (shape k+1 per axis). The sum
    sum_kappa a_kappa omega_kappa is piecewise constant on the level-(k+1)
    dyadic partition, so the middle value is exact up to rounding. Returns
    (l2 norm, exact L_p norm, l2 norm): the two-sided comparison scaffold.
    """
    p = float(p)
    if not 1.0 <= p < math.inf:
        raise ValueError(f"p must lie in [1, infinity), got {p}")
    if isinstance(a, Mapping):
        kappas = list(a)
        k = tuple(max(key[j] for key in kappas) for j in range(len(kappas[0])))
        arr = np.zeros(tuple(kj + 1 for kj in k))
        for key, val in a.items():
            arr[key] = val
    else:
        arr = np.asarray(a, dtype=float)
    k = tuple(s - 1 for s in arr.shape)
    values = arr
    for j, kj in enumerate(k):
        table = _axis_sign_table(kj, kj)
        values = np.moveaxis(
            np.tensordot(table, values, axes=([0], [j])), 0, j
        )
    vol = float(np.prod([2.0 ** -(kj + 1) for kj in k]))
    mid = float(np.sum(np.abs(values) ** p) * vol) ** (1.0 / p)
    l2 = float(np.linalg.norm(arr))
    return l2, mid, l2


# ---------------------------------------------------------------------------
# ensemble reports


@dataclass(frozen=True)
class LPReport:
    p: float
    k: tuple[int, ...]
    degrees: tuple[int, ...]
    trials: int
    sign_trials: int
    seed: int
    square_ratio: dict
    pstar: dict
    sign_ratio: dict

    def rows(self) -> list[dict]:
        out = []
        for name, stats in (
            ("square_ratio", self.square_ratio),
            ("pstar", self.pstar),
            ("sign_ratio", self.sign_ratio),
        ):
            row = {"statistic": name, "p": self.p}
            row.update(stats)
            out.append(row)
        return out


def _stats(values: list[float]) -> dict:
    arr = np.asarray(values)
    return {
        "min": float(arr.min()),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
    }


def lp_report(
    grid: Grid,
    k,
    degrees,
    p: float,
    trials: int = 50,
    sign_trials: int = 10,
    seed: int = 0,
) -> LPReport:
    """Ratio statistics over a random ensemble of resolved functions."""
    from .grid import _as_tuple

    k = _as_tuple(k, grid.d, "k")
    degs = _as_tuple(degrees, grid.d, "degrees")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    square_vals, pstar_vals, sign_vals = [], [], []
    for _ in range(trials):
        f = random_resolved(grid, k, degs, rng)
        dec = analyze(f, ("box", k), degs)
        resolved = synthesize(dec)
        norm_p = lp_norm(resolved, p)
        square_vals.append(lp_norm(square_function(dec), p) / norm_p)
        parts = detail_components(dec)
        pstar = min(2.0, p)
        agg = sum(lp_norm(g, p) ** pstar for g in parts.values()) ** (1.0 / pstar)
        pstar_vals.append(norm_p / agg)
        for _ in range(sign_trials):
            fam = SignFamily.random(k, rng)
            signed = synthesize(_signed(dec, fam))
            sign_vals.append(lp_norm(signed, p) / norm_p)
    return LPReport(
        p=float(p),
        k=k,
        degrees=degs,
        trials=trials,
        sign_trials=sign_trials,
        seed=seed,
        square_ratio=_stats(square_vals),
        pstar=_stats(pstar_vals),
        sign_ratio=_stats(sign_vals),
    )
