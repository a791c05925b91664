"""Points, directions, projections and the level quotient of a point set.

Every other module works on the *level structure*: each point is mapped to
one level (fiber) per direction, where a level collects the points sharing
the same projection ``a . x`` up to a clustering tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError


class ClusterWidthWarning(UserWarning):
    """A level cluster grew wider than ten times its merge tolerance."""


def _frozen(arr, dtype=float) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


def project(p: Sequence[float], a: Sequence[float]) -> float:
    """Return ``sum_j a[j] * p[j]`` summed left to right."""
    if len(p) != len(a):
        raise InputError(f"dimension mismatch: point has {len(p)} coordinates, direction has {len(a)}")
    s = 0.0
    for x, y in zip(p, a):
        s += float(x) * float(y)
    return s


def project_all(points: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Vectorised :func:`project`; bitwise identical to the scalar loop."""
    points = np.asarray(points, dtype=float)
    a = np.asarray(a, dtype=float)
    if points.shape[1] != a.shape[0]:
        raise InputError(f"dimension mismatch: points have {points.shape[1]} coordinates, direction has {a.shape[0]}")
    s = np.zeros(points.shape[0])
    for j in range(points.shape[1]):
        s = s + points[:, j] * a[j]
    return s


@dataclass(frozen=True)
class PointSet:
    """Finite sample ``Q`` with function values ``f``."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        vals = np.array(self.values, dtype=float).reshape(-1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError("point set must be a non-empty (n, d) array")
        if pts.shape[0] != vals.shape[0]:
            raise InputError(f"{pts.shape[0]} points but {vals.shape[0]} values")
        if not np.all(np.isfinite(pts)):
            raise InputError("point coordinates must be finite")
        if not np.all(np.isfinite(vals)):
            raise InputError("function values must be finite")
        seen = {}
        for i, row in enumerate(pts):
            key = tuple(row.tolist())
            if key in seen:
                raise InputError(f"duplicate points at indices {seen[key]} and {i}")
            seen[key] = i
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def with_values(self, values) -> "PointSet":
        return PointSet(self.points, values)


@dataclass(frozen=True)
class DirectionPair:
    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self):
        a1 = _frozen(self.a1)
        a2 = _frozen(self.a2)
        if a1.ndim != 1 or a2.ndim != 1 or a1.shape != a2.shape:
            raise InputError("directions must be vectors of the same dimension")
        for name, a in (("a1", a1), ("a2", a2)):
            if not np.all(np.isfinite(a)):
                raise InputError(f"direction {name} must be finite")
            if np.max(np.abs(a)) == 0:
                raise InputError(f"direction {name} is the zero vector")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)

    @property
    def dimension(self) -> int:
        return self.a1.shape[0]

    def __getitem__(self, t: int) -> np.ndarray:
        if t == 1:
            return self.a1
        if t == 2:
            return self.a2
        raise IndexError(t)


def detect_parallel(dirs: DirectionPair, tau_angle: float = 1e-9) -> bool:
    """True iff ``|a1 . a2| >= (1 - tau_angle) * |a1| |a2|``."""
    dot = project(dirs.a1, dirs.a2)
    n1 = math.sqrt(project(dirs.a1, dirs.a1))
    n2 = math.sqrt(project(dirs.a2, dirs.a2))
    return abs(dot) >= (1.0 - tau_angle) * n1 * n2


@dataclass(frozen=True)
class LevelStructure:
    """Quotient of a point set by the two projections.

    ``assignment[i, t - 1]`` is the level index of point ``i`` in direction
    ``t``; ``levels1``/``levels2`` hold the cluster midpoints.
    """

    levels1: np.ndarray
    levels2: np.ndarray
    assignment: np.ndarray
    tau: tuple
    width: tuple
    parallel: bool = False
    fibers1: tuple = field(init=False, repr=False, compare=False)
    fibers2: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "levels1", _frozen(self.levels1))
        object.__setattr__(self, "levels2", _frozen(self.levels2))
        assignment = _frozen(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", assignment)
        for t, name in ((1, "fibers1"), (2, "fibers2")):
            count = len(self.levels(t))
            members = [[] for _ in range(count)]
            for i, j in enumerate(assignment[:, t - 1]):
                members[j].append(i)
            object.__setattr__(self, name, tuple(tuple(m) for m in members))

    @property
    def n_points(self) -> int:
        return self.assignment.shape[0]

    def levels(self, t: int) -> np.ndarray:
        return self.levels1 if t == 1 else self.levels2

    def n_levels(self, t: int) -> int:
        return len(self.levels(t))

    def level_of(self, i: int, t: int) -> int:
        return int(self.assignment[i, t - 1])

    def fiber(self, t: int, j: int) -> tuple:
        """Point indices on level ``j`` of direction ``t``, ascending."""
        return (self.fibers1 if t == 1 else self.fibers2)[j]

    def fibers(self, t: int) -> tuple:
        return self.fibers1 if t == 1 else self.fibers2

    def same_level(self, i: int, k: int, t: int) -> bool:
        return self.assignment[i, t - 1] == self.assignment[k, t - 1]


def default_tau(projections: np.ndarray) -> float:
    """``1e-9`` times the projection range, or the largest magnitude if bigger.

    The magnitude floor keeps float noise on a single true level from being
    split when the range itself is only rounding error.
    """
    spread = float(np.max(projections) - np.min(projections))
    return 1e-9 * max(spread, float(np.max(np.abs(projections))))


def cluster_projections(proj: np.ndarray, tau: float):
    """Single-linkage clustering of sorted projections with gap threshold ``tau``.

    Returns ``(representatives, labels, width)``.
    """
    order = np.argsort(proj, kind="stable")
    labels = np.empty(len(proj), dtype=np.int64)
    reps = []
    width = 0.0
    start = 0
    for pos in range(1, len(order) + 1):
        if pos == len(order) or proj[order[pos]] - proj[order[pos - 1]] > tau:
            lo = proj[order[start]]
            hi = proj[order[pos - 1]]
            labels[order[start:pos]] = len(reps)
            reps.append(lo + (hi - lo) / 2)
            width = max(width, hi - lo)
            start = pos
    return np.array(reps), labels, width


def build_levels(
    ps: PointSet,
    dirs: DirectionPair,
    tau: Optional[float] = None,
    tau_angle: float = 1e-9,
) -> LevelStructure:
    """Cluster the projections onto ``a1`` and ``a2`` into levels.

    ``tau=None`` picks :func:`default_tau` separately for each direction.
    """
    if ps.dimension != dirs.dimension:
        raise InputError(f"points are {ps.dimension}-dimensional but directions are {dirs.dimension}-dimensional")
    if tau is not None and not (tau >= 0 and math.isfinite(tau)):
        raise InputError("tau must be a finite non-negative number")
    reps, labels, taus, widths = [], [], [], []
    for t in (1, 2):
        proj = project_all(ps.points, dirs[t])
        tt = default_tau(proj) if tau is None else float(tau)
        r, lab, w = cluster_projections(proj, tt)
        if w > 10 * tt:
            warnings.warn(
                f"direction {t}: level cluster width {w:.3g} exceeds 10*tau={10 * tt:.3g}",
                ClusterWidthWarning,
                stacklevel=2,
            )
        reps.append(r)
        labels.append(lab)
        taus.append(tt)
        widths.append(w)
    return LevelStructure(
        levels1=reps[0],
        levels2=reps[1],
        assignment=np.stack(labels, axis=1),
        tau=tuple(taus),
        width=tuple(widths),
        parallel=detect_parallel(dirs, tau_angle),
    )
