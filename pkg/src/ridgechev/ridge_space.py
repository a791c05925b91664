"""Sums of two ridge functions restricted to the levels of a point set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .geometry import LevelStructure, PointSet


@dataclass(frozen=True)
class RidgeSum:
    """``G(x) = g1(a1 . x) + g2(a2 . x)`` stored as level-indexed tables.

    ``u[j]`` is the value of ``g1`` on level ``j`` of direction 1, ``v[k]``
    the value of ``g2`` on level ``k`` of direction 2.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float).reshape(-1)
        v = np.array(self.v, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise InputError("ridge tables must be finite")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def zeros(cls, levels: LevelStructure) -> "RidgeSum":
        return cls(np.zeros(levels.n_levels(1)), np.zeros(levels.n_levels(2)))

    @classmethod
    def constant(cls, levels: LevelStructure, c: float) -> "RidgeSum":
        return cls(np.full(levels.n_levels(1), float(c)), np.zeros(levels.n_levels(2)))

    def __add__(self, other: "RidgeSum") -> "RidgeSum":
        return RidgeSum(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "RidgeSum") -> "RidgeSum":
        return RidgeSum(self.u - other.u, self.v - other.v)

    def __mul__(self, alpha: float) -> "RidgeSum":
        return RidgeSum(alpha * self.u, alpha * self.v)

    __rmul__ = __mul__

    def shifted(self, c: float) -> "RidgeSum":
        """Same function, tables ``(u + c, v - c)``."""
        return RidgeSum(self.u + c, self.v - c)

    def normalized(self) -> "RidgeSum":
        """Shift so that ``min(v) == 0``."""
        if len(self.v) == 0:
            return self
        return self.shifted(float(np.min(self.v)))

    def check_shape(self, levels: LevelStructure) -> None:
        if len(self.u) != levels.n_levels(1) or len(self.v) != levels.n_levels(2):
            raise InputError(
                f"ridge tables have sizes ({len(self.u)}, {len(self.v)}) but the level structure has "
                f"({levels.n_levels(1)}, {levels.n_levels(2)}) levels"
            )


def evaluate(G: RidgeSum, levels: LevelStructure, i: int) -> float:
    if not 0 <= i < levels.n_points:
        raise InputError(f"point index {i} out of range [0, {levels.n_points})")
    G.check_shape(levels)
    return float(G.u[levels.assignment[i, 0]] + G.v[levels.assignment[i, 1]])


def evaluate_all(G: RidgeSum, levels: LevelStructure) -> np.ndarray:
    G.check_shape(levels)
    return G.u[levels.assignment[:, 0]] + G.v[levels.assignment[:, 1]]


def default_eps_ext(norm: float) -> float:
    return 1e-7 * max(1.0, norm)


@dataclass(frozen=True)
class Residual:
    """Pointwise residual ``f - G`` with its uniform norm and extremal set."""

    r: np.ndarray
    norm: float
    argmax: tuple
    eps_ext: float

    @classmethod
    def from_values(cls, r, eps_ext: Optional[float] = None) -> "Residual":
        r = np.array(r, dtype=float)
        r.setflags(write=False)
        norm = float(np.max(np.abs(r)))
        eps = default_eps_ext(norm) if eps_ext is None else float(eps_ext)
        argmax = tuple(int(i) for i in np.flatnonzero(np.abs(r) >= norm - eps))
        return cls(r, norm, argmax, eps)

    def is_extremal(self, i: int) -> bool:
        return abs(self.r[i]) >= self.norm - self.eps_ext


def residual(ps: PointSet, G: RidgeSum, levels: LevelStructure, eps_ext: Optional[float] = None) -> Residual:
    if len(ps) != levels.n_points:
        raise InputError("point set and level structure disagree on the number of points")
    return Residual.from_values(ps.values - evaluate_all(G, levels), eps_ext)


def sup_norm_parts(G: RidgeSum) -> tuple:
    """``(max |u|, max |v|)``; an empty table counts as 0."""
    nu = float(np.max(np.abs(G.u))) if len(G.u) else 0.0
    nv = float(np.max(np.abs(G.v))) if len(G.v) else 0.0
    return nu, nv
