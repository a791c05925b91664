"""Best uniform approximation by a sum of two ridge functions on a finite set.

The minimax problem ``min_{u,v,t} t  s.t.  |f_i - u_j(i) - v_k(i)| <= t`` is
solved through its dual

    max  sum_i f_i (alpha_i - beta_i)
    s.t. sum over each fiber of (alpha - beta) = 0     (both directions)
         sum_i (alpha_i + beta_i) = 1,  alpha, beta >= 0

whose simplex multipliers are exactly ``(u, v, t)``. The signed weights
``lambda = alpha - beta`` form the discrete dual witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OracleCapError, SolverError
from .geometry import LevelStructure, PointSet
from .ridge_space import RidgeSum, evaluate_all
from .simplex import solve_lp

SUPPORT_TOL = 1e-12
ORACLE_MAX_LEVELS = 12
ORACLE_MAX_POINTS = 14


@dataclass(frozen=True)
class DualWitness:
    """Signed point weights: unit total variation, zero sum on every fiber."""

    weights: np.ndarray
    interpolation: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def support_plus(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.weights > SUPPORT_TOL))

    @property
    def support_minus(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.weights < -SUPPORT_TOL))

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def fiber_sums(self, levels: LevelStructure, t: int) -> np.ndarray:
        sums = np.zeros(levels.n_levels(t))
        np.add.at(sums, levels.assignment[:, t - 1], self.weights)
        return sums

    def violations(self, levels: LevelStructure, r=None, error=None, eps_ext=None, tol: float = 1e-10) -> list:
        """Human-readable list of broken witness invariants (empty if valid)."""
        out = []
        tv = self.total_variation()
        if abs(tv - 1.0) > tol:
            out.append(f"total variation {tv!r} != 1")
        directions = (1,) if levels.parallel else (1, 2)
        for t in directions:
            sums = self.fiber_sums(levels, t)
            bad = np.flatnonzero(np.abs(sums) > tol)
            if bad.size:
                j = int(bad[0])
                out.append(f"direction-{t} level {j} has net weight {sums[j]!r}")
        if r is not None and error is not None:
            eps = 1e-7 * max(1.0, error) if eps_ext is None else eps_ext
            for i in self.support_plus:
                if abs(r[i] - error) > eps:
                    out.append(f"point {i} carries positive weight but residual {r[i]!r} != +{error!r}")
            for i in self.support_minus:
                if abs(r[i] + error) > eps:
                    out.append(f"point {i} carries negative weight but residual {r[i]!r} != -{error!r}")
        return out


@dataclass(frozen=True)
class MinimaxSolution:
    G0: RidgeSum
    error: float
    dual: DualWitness
    pivots: int
    lp_value: float
    parallel: bool = False

    @property
    def interpolation(self) -> bool:
        return self.dual.interpolation


def _constraint_rows(levels: LevelStructure) -> np.ndarray:
    """Fiber incidence matrix: one row per level (direction 1 then 2), one column per point."""
    n = levels.n_points
    directions = (1,) if levels.parallel else (1, 2)
    blocks = []
    for t in directions:
        block = np.zeros((levels.n_levels(t), n))
        block[levels.assignment[:, t - 1], np.arange(n)] = 1.0
        blocks.append(block)
    return np.vstack(blocks)


def interpolation_tol(values) -> float:
    return 1e-12 * max(1.0, float(np.max(np.abs(values))))


def solve_minimax(ps: PointSet, levels: LevelStructure) -> MinimaxSolution:
    """Exact best approximation on a finite set, with its dual witness.

    When the two directions are parallel only direction 1 carries a ridge
    function and ``v`` is identically zero.
    """
    f = ps.values
    n = len(ps)
    M = _constraint_rows(levels)
    rows = M.shape[0]
    A = np.zeros((rows + 1, 2 * n))
    A[:rows, :n] = M
    A[:rows, n:] = -M
    A[rows, :] = 1.0
    b = np.zeros(rows + 1)
    b[rows] = 1.0
    c = np.concatenate([f, -f])
    lp = solve_lp(c, A, b)

    n1 = levels.n_levels(1)
    u = lp.y[:n1]
    v = np.zeros(levels.n_levels(2)) if levels.parallel else lp.y[n1:rows]
    t = float(lp.y[rows])
    G0 = RidgeSum(u, v).normalized()
    r = f - evaluate_all(G0, levels)
    error = float(np.max(np.abs(r)))
    scale = 1.0 + float(np.max(np.abs(f)))
    if abs(error - t) > 1e-9 * scale or abs(lp.objective - t) > 1e-9 * scale:
        raise SolverError(f"primal/dual mismatch: residual norm {error!r}, multiplier {t!r}, objective {lp.objective!r}")

    if error <= interpolation_tol(f):
        dual = DualWitness(np.zeros(n), interpolation=True)
    else:
        lam = lp.x[:n] - lp.x[n:]
        lam[np.abs(lam) <= SUPPORT_TOL] = 0.0
        dual = DualWitness(lam / np.sum(np.abs(lam)))
    return MinimaxSolution(G0=G0, error=error, dual=dual, pivots=lp.pivots, lp_value=lp.objective,
                           parallel=levels.parallel)


class AlternatingResult(NamedTuple):
    G: RidgeSum
    error: float
    sweeps: int


def _fiber_centers(r: np.ndarray, labels: np.ndarray, count: int) -> np.ndarray:
    hi = np.full(count, -np.inf)
    lo = np.full(count, np.inf)
    np.maximum.at(hi, labels, r)
    np.minimum.at(lo, labels, r)
    return (hi + lo) / 2


def alternating_solver(ps: PointSet, levels: LevelStructure, max_sweeps: int = 10_000,
                       tol: float = 1e-12) -> AlternatingResult:
    """Diliberto-Straus style heuristic: repeatedly recentre each fiber.

    One sweep recentres every level of one direction at the Chebyshev centre
    ``(max + min) / 2`` of the current residual. Directions alternate. The
    loop stops when the residual vanishes, when a sweep changes nothing, or
    when two consecutive sweeps (one full cycle) reduce the uniform error by
    less than ``tol``. The result is an upper bound on the optimum.
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    f = ps.values
    u = np.zeros(levels.n_levels(1))
    v = np.zeros(levels.n_levels(2))
    r = f.copy()
    history = [float(np.max(np.abs(r)))]
    zero = interpolation_tol(f)
    directions = (1,) if levels.parallel else (1, 2)
    sweeps = 0
    while sweeps < max_sweeps:
        t = directions[sweeps % len(directions)]
        labels = levels.assignment[:, t - 1]
        centers = _fiber_centers(r, labels, levels.n_levels(t))
        if t == 1:
            u = u + centers
        else:
            v = v + centers
        r = r - centers[labels]
        sweeps += 1
        history.append(float(np.max(np.abs(r))))
        if history[-1] <= zero:
            break
        if np.all(np.abs(centers) <= zero) and sweeps > 1:
            break
        if len(directions) == 1:
            break
        if sweeps >= 2 and history[-3] - history[-1] < tol:
            break
    G = RidgeSum(u, v)
    return AlternatingResult(G, float(np.max(np.abs(f - evaluate_all(G, levels)))), sweeps)


def check_oracle_caps(ps: PointSet, levels: LevelStructure) -> None:
    total = levels.n_levels(1) + (0 if levels.parallel else levels.n_levels(2))
    if total > ORACLE_MAX_LEVELS or len(ps) > ORACLE_MAX_POINTS:
        raise OracleCapError(
            f"brute-force oracle refuses instance with {len(ps)} points and {total} levels "
            f"(caps: {ORACLE_MAX_POINTS} points, {ORACLE_MAX_LEVELS} levels)"
        )


def brute_force_oracle(ps: PointSet, levels: LevelStructure) -> float:
    """Exact minimax error by enumerating the vertices of the dual polytope.

    The dual feasible set ``{lambda : fiber sums 0, |lambda|_1 <= 1}`` has as
    vertices the normalised minimal-support kernel vectors of the fiber
    incidence matrix. Every point subset whose incidence columns have a
    one-dimensional kernel is tried; the largest ``|f . lambda|`` is the
    optimum by LP duality. Shares no code with the simplex path.
    """
    check_oracle_caps(ps, levels)
    M = _constraint_rows(levels)
    f = ps.values
    n = len(ps)
    best = 0.0
    for k in range(2, min(n, M.shape[0] + 1) + 1):
        combos = np.array(list(itertools.combinations(range(n), k)))
        sub = np.transpose(M[:, combos], (1, 0, 2))
        _, s, vh = np.linalg.svd(sub, full_matrices=True)
        rank = np.sum(s > 1e-8, axis=1)
        keep = np.flatnonzero(k - rank == 1)
        if keep.size == 0:
            continue
        z = vh[keep, -1, :]
        z = z / np.sum(np.abs(z), axis=1, keepdims=True)
        vals = np.abs(np.sum(z * f[combos[keep]], axis=1))
        best = max(best, float(np.max(vals)))
    return best
