"""Multi-index arithmetic, dyadic cube geometry, and lattice index sets.

Cube geometry uses exact dyadic rationals (integer position, power-of-two
denominator), so nesting and distance comparisons never suffer float ties.
Hyperbolic-cross membership with irrational weights uses a 1e-12 relative
tolerance with ties included; the admissible weight sets are open, so tie
handling cannot change any asymptotics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DyadicCube",
    "nesting",
    "enum_box",
    "enum_cross",
    "enum_shell",
    "cross_contains",
    "counting_ratios",
    "support",
    "weighted_sum",
    "min_exponent",
    "max_exponent",
    "min_multiplicity",
    "max_multiplicity",
]

_REL_TOL = 1e-12


def support(kappa: Sequence[int]) -> frozenset[int]:
    """Axes (0-based) where the entry is nonzero."""
    return frozenset(j for j, k in enumerate(kappa) if k != 0)


def weighted_sum(kappa: Sequence[int], beta: Sequence[float]) -> float:
    return float(sum(k * b for k, b in zip(kappa, beta)))


def min_exponent(x: Sequence[float]) -> float:
    return float(min(x))


def max_exponent(x: Sequence[float]) -> float:
    return float(max(x))


def min_multiplicity(x: Sequence[float]) -> int:
    """How many entries attain the minimum (relative tolerance 1e-12)."""
    m = min(x)
    tol = _REL_TOL * max(1.0, abs(m))
    return sum(1 for v in x if v <= m + tol)


def max_multiplicity(x: Sequence[float]) -> int:
    m = max(x)
    tol = _REL_TOL * max(1.0, abs(m))
    return sum(1 for v in x if v >= m - tol)


@dataclass(frozen=True)
class DyadicCube:
    """Open box 2^-level * pos + 2^-level * (0,1)^d with per-axis levels."""

    level: tuple[int, ...]
    pos: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "level", tuple(int(k) for k in self.level))
        object.__setattr__(self, "pos", tuple(int(v) for v in self.pos))
        if len(self.level) != len(self.pos):
            raise ValueError("level and position must have the same length")
        if any(k < 0 for k in self.level):
            raise ValueError(f"levels must be >= 0, got {self.level}")

    @property
    def d(self) -> int:
        return len(self.level)

    def lo(self, axis: int) -> Fraction:
        return Fraction(self.pos[axis], 2 ** self.level[axis])

    def hi(self, axis: int) -> Fraction:
        return Fraction(self.pos[axis] + 1, 2 ** self.level[axis])

    def width(self, axis: int) -> Fraction:
        return Fraction(1, 2 ** self.level[axis])

    def volume(self) -> Fraction:
        v = Fraction(1)
        for j in range(self.d):
            v *= self.width(j)
        return v

    def diameter(self) -> float:
        return math.sqrt(sum(float(self.width(j)) ** 2 for j in range(self.d)))

    def inside_unit_cube(self) -> bool:
        return all(0 <= self.pos[j] < 2 ** self.level[j] for j in range(self.d))


def _axis_relation(ka: int, va: int, kb: int, vb: int) -> str:
    """Relation of two dyadic intervals: nested one way, the other, or disjoint."""
    if ka >= kb:
        return "a_in_b" if (va >> (ka - kb)) == vb else "disjoint"
    return "b_in_a" if (vb >> (kb - ka)) == va else "disjoint"


def nesting(a: DyadicCube, b: DyadicCube) -> str:
    """Exact relation of two dyadic cubes.

    One of "equal", "a_inside_b", "b_inside_a", "disjoint", or "overlap"
    (the last only when the level vectors are incomparable axis by axis:
    intersecting interiors without containment).
    """
    if a.d != b.d:
        raise ValueError("cubes have different dimensions")
    a_sub = True
    b_sub = True
    for j in range(a.d):
        rel = _axis_relation(a.level[j], a.pos[j], b.level[j], b.pos[j])
        if rel == "disjoint":
            return "disjoint"
        same = a.level[j] == b.level[j]
        a_sub &= rel == "a_in_b" or same
        b_sub &= rel == "b_in_a" or same
    if a_sub and b_sub:
        return "equal"
    if a_sub:
        return "a_inside_b"
    if b_sub:
        return "b_inside_a"
    return "overlap"


def enum_box(k: Sequence[int]) -> list[tuple[int, ...]]:
    """All multi-indices kappa <= k componentwise, in lexicographic order."""
    if any(int(x) < 0 for x in k):
        raise ValueError(f"box corner must be >= 0, got {tuple(k)}")
    return list(itertools.product(*(range(int(x) + 1) for x in k)))


def cross_contains(kappa: Sequence[int], beta: Sequence[float], r: float) -> bool:
    """Membership in the hyperbolic cross (kappa, beta) <= r, ties included."""
    return weighted_sum(kappa, beta) <= r + _REL_TOL * max(1.0, abs(r))


def enum_cross(beta: Sequence[float], r: float) -> list[tuple[int, ...]]:
    """All kappa with (kappa, beta) <= r, lexicographic; beta strictly positive."""
    beta = tuple(float(b) for b in beta)
    if any(b <= 0 for b in beta):
        raise ValueError(f"cross weights must be positive, got {beta}")
    if r < 0:
        return []
    bound = tuple(int(math.floor(r / b + 1e-9)) for b in beta)
    return [k for k in enum_box(bound) if cross_contains(k, beta, r)]


def enum_shell(beta: Sequence[float], s: int) -> list[tuple[int, ...]]:
    """All kappa with s-1 < (kappa, beta) <= s (same tie rule as enum_cross)."""
    if s < 1:
        raise ValueError(f"shell index must be >= 1, got {s}")
    return [
        k
        for k in enum_cross(beta, s)
        if not cross_contains(k, beta, s - 1)
    ]


def _lattice(bound: Sequence[int]) -> np.ndarray:
    """Integer lattice of the box [0, bound] as an (N, d) array."""
    axes = [np.arange(b + 1) for b in bound]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def counting_ratios(beta: Sequence[float], alpha: Sequence[float], r_max: int) -> list[dict]:
    """Exact lattice sums against their model growth/decay expressions.

    For each r <= r_max reports the sum of 2^(kappa, alpha) over the cross
    (kappa, beta) <= r next to 2^(Mr) r^(C-1), and the tail sum of
    2^-(kappa, alpha) over (kappa, beta) > r next to 2^(-mr) r^(c-1), where
    M/m are the extreme entries of alpha/beta and C/c their multiplicities.
    The tail is truncated where terms become negligible (< 2^-60 relative).
    """
    beta = tuple(float(b) for b in beta)
    alpha = tuple(float(a) for a in alpha)
    if any(b <= 0 for b in beta) or any(a <= 0 for a in alpha):
        raise ValueError("alpha and beta must be strictly positive")
    ratio_vec = tuple(a / b for a, b in zip(alpha, beta))
    big = max_exponent(ratio_vec)
    big_mult = max_multiplicity(ratio_vec)
    small = min_exponent(ratio_vec)
    small_mult = min_multiplicity(ratio_vec)
    if big <= 0:
        raise ValueError("growth model needs a positive maximal exponent")
    r_max = int(r_max)
    if r_max < 1:
        raise ValueError(f"r_max must be >= 1, got {r_max}")

    # one lattice enumeration covers every r; the tail adds enough margin
    # that the discarded remainder is below 2^-60 of the retained sum
    margin = tuple(int(math.ceil(62.0 / a)) for a in alpha)
    bound = tuple(
        int(math.floor(r_max / b + 1e-9)) + m for b, m in zip(beta, margin)
    )
    lattice = _lattice(bound)
    wbeta = lattice @ np.asarray(beta)
    walpha = lattice @ np.asarray(alpha)
    rows = []
    for r in range(1, r_max + 1):
        inside = wbeta <= r + _REL_TOL * max(1.0, r)
        grow = float(np.sum(np.exp2(walpha[inside])))
        grow_model = float(2.0 ** (big * r) * r ** (big_mult - 1))
        tail = float(np.sum(np.exp2(-walpha[~inside])))
        tail_model = float(2.0 ** (-small * r) * r ** (small_mult - 1))
        rows.append(
            {
                "r": r,
                "growth_sum": grow,
                "growth_model": grow_model,
                "growth_ratio": grow / grow_model,
                "tail_sum": tail,
                "tail_model": tail_model,
                "tail_ratio": tail / tail_model,
            }
        )
    return rows
