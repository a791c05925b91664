"""Dense two-phase tableau simplex with Bland's least-index rule.

Solves ``max c.x  s.t.  A x = b, x >= 0`` for ``b >= 0``. The tableau keeps
the artificial columns through phase 2 (barred from entering) so that the
simplex multipliers ``y = c_B B^-1`` can be read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    y: np.ndarray
    pivots: int
    basis: tuple


def _pivot(T: np.ndarray, basis: list, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _optimize(T, basis, cost, n_allowed, tol, max_pivots):
    pivots = 0
    while True:
        reduced = cost[:-1] - cost[basis] @ T[:, :-1]
        entering = -1
        for j in range(n_allowed):
            if reduced[j] > tol:
                entering = j
                break
        if entering < 0:
            return pivots
        col = T[:, entering]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise SolverError("LP reported unbounded; the minimax LP is bounded by construction")
        ratios = np.maximum(T[rows, -1], 0.0) / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        leave = min(ties, key=lambda r: basis[r])
        _pivot(T, basis, int(leave), entering)
        pivots += 1
        if pivots > max_pivots:
            raise SolverError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(c, A, b, tol: float = 1e-11, max_pivots: int = 100_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise SolverError("right-hand side must be non-negative")
    T = np.zeros((m, n + m + 1))
    T[:, :n] = A
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b
    basis = list(range(n, n + m))

    phase1 = np.zeros(n + m + 1)
    phase1[n:n + m] = -1.0
    pivots = _optimize(T, basis, phase1, n + m, tol, max_pivots)
    infeasibility = float(np.sum(T[[r for r, j in enumerate(basis) if j >= n], -1]))
    if infeasibility > tol * max(1.0, float(np.max(b, initial=0.0))):
        raise SolverError("LP reported infeasible; the minimax LP is feasible by construction")

    # Drive zero-level artificials out where the row allows it; rows that
    # keep an artificial are redundant and get multiplier 0.
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > tol)
            if nz.size:
                _pivot(T, basis, r, int(nz[0]))
                pivots += 1

    phase2 = np.zeros(n + m + 1)
    phase2[:n] = c
    pivots += _optimize(T, basis, phase2, n, tol, max_pivots)

    x = np.zeros(n + m)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.maximum(x[:n], 0.0)
    y = phase2[basis] @ T[:, n:n + m]
    return LPResult(x=x, objective=float(c @ x), y=y, pivots=pivots, basis=tuple(basis))
