"""Paths with respect to two directions and their alternating functionals.

A path is an ordered sequence of point indices in which consecutive points
alternately share their level in direction 1 and in direction 2. Edge ``e``
(linking ``indices[e]`` and ``indices[e + 1]``) has type ``start_type`` for
even ``e`` and the other type for odd ``e``.

Signs follow 1-based positions: the first point of a path carries ``-1``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RidgechevError
from .geometry import LevelStructure
from .ridge_space import RidgeSum, evaluate_all, sup_norm_parts


class PathError(RidgechevError):
    """A candidate index sequence is not a path; ``edge`` is the first bad edge."""

    def __init__(self, message: str, edge: int = -1):
        super().__init__(message)
        self.edge = edge


def edge_type(start_type: int, e: int) -> int:
    return start_type if e % 2 == 0 else 3 - start_type


@dataclass(frozen=True)
class Path:
    indices: tuple
    start_type: int

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.start_type not in (1, 2):
            raise PathError(f"start_type must be 1 or 2, got {self.start_type!r}")
        if len(self.indices) < 1:
            raise PathError("a path needs at least one point")

    def __len__(self) -> int:
        return len(self.indices)

    def signs(self) -> np.ndarray:
        """``(-1)**i`` for 1-based positions ``i``."""
        return np.where(np.arange(1, len(self.indices) + 1) % 2 == 0, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {"start_type": self.start_type, "indices": list(self.indices)}

    @classmethod
    def from_dict(cls, data: dict) -> "Path":
        return cls(tuple(data["indices"]), int(data["start_type"]))


class ClosedPath(Path):
    """A path of even length whose wrap-around edge continues the alternation."""


def _check_edge(levels: LevelStructure, a: int, b: int, t: int, e: int) -> None:
    if a == b:
        raise PathError(f"alternation violated at edge {e}: consecutive points coincide (index {a})", e)
    if not levels.same_level(a, b, t):
        raise PathError(
            f"alternation violated at edge {e}: points {a} and {b} do not share a direction-{t} level", e
        )


def validate_path(indices: Sequence[int], start_type: int, levels: LevelStructure, closed: bool = False) -> Path:
    """Check the path conditions and return a :class:`Path`.

    With ``closed=True`` the wrap-around edge is checked as well and a
    :class:`ClosedPath` is returned. Raises :class:`PathError` naming the
    first offending edge.
    """
    indices = [int(i) for i in indices]
    if len(indices) < 1:
        raise PathError("a path needs at least one point")
    for i in indices:
        if not 0 <= i < levels.n_points:
            raise PathError(f"point index {i} out of range [0, {levels.n_points})")
    path = Path(tuple(indices), start_type)
    for e in range(len(indices) - 1):
        _check_edge(levels, indices[e], indices[e + 1], edge_type(start_type, e), e)
    if not closed:
        return path
    n = len(indices)
    if n % 2 != 0:
        raise PathError(f"not closed: odd length {n}", n - 1)
    _check_edge(levels, indices[-1], indices[0], edge_type(start_type, n - 1), n - 1)
    return ClosedPath(path.indices, start_type)


def is_closed(q: Path, levels: LevelStructure) -> bool:
    n = len(q)
    if n < 2 or n % 2 != 0:
        return False
    a, b = q.indices[-1], q.indices[0]
    return a != b and levels.same_level(a, b, edge_type(q.start_type, n - 1))


def as_closed(q: Path, levels: LevelStructure) -> ClosedPath:
    return validate_path(q.indices, q.start_type, levels, closed=True)


def path_functional(q: Path, F) -> float:
    """``(1/n) * sum_i (-1)**i F(q_i)``, positions counted from 1."""
    F = np.asarray(F, dtype=float)
    vals = F[list(q.indices)]
    return float(np.dot(q.signs(), vals)) / len(q)


def alternating_sum(q: Path, F) -> float:
    """``sum_i (-1)**i F(q_i)`` without normalisation."""
    F = np.asarray(F, dtype=float)
    return float(np.dot(q.signs(), F[list(q.indices)]))


def functional_norm(q: Path) -> float:
    """Norm of the path functional as a functional on ``C(Q)``.

    Equals 1 exactly when no point occurs at both an odd and an even
    position.
    """
    net = Counter()
    for pos, i in enumerate(q.indices, start=1):
        net[i] += 1 if pos % 2 == 0 else -1
    return sum(abs(c) for c in net.values()) / len(q)


def odd_even_disjoint(q: Path) -> bool:
    odd = set(q.indices[0::2])
    even = set(q.indices[1::2])
    return not (odd & even)


def near_annihilation_bound(q: Path, G: RidgeSum, levels: LevelStructure) -> tuple:
    """``(|l_q(G)|, (2/n) (||g1|| + ||g2||))``; the first never exceeds the second."""
    lhs = abs(path_functional(q, evaluate_all(G, levels)))
    n1, n2 = sup_norm_parts(G)
    rhs = 2.0 / len(q) * (n1 + n2)
    return lhs, rhs
