import numpy as np
import pytest
from scipy.optimize import linprog

from ridgechev.errors import SolverError
from ridgechev.simplex import solve_lp


def test_small_lp_with_known_optimum():
    # max x + y  s.t.  x + 2y + s1 = 4, 3x + y + s2 = 6
    c = [1, 1, 0, 0]
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    res = solve_lp(c, A, [4, 6])
    assert res.objective == pytest.approx(2.8)
    assert res.x[:2] == pytest.approx([1.6, 1.2])
    assert res.y == pytest.approx([0.4, 0.2])


def test_redundant_rows_are_tolerated():
    c = [1, 2, 0]
    A = [[1, 1, 1], [2, 2, 2], [1, 0, 0]]
    res = solve_lp(c, A, [1, 2, 0.25])
    assert res.objective == pytest.approx(0.25 + 2 * 0.75)


def test_unbounded_raises():
    with pytest.raises(SolverError, match="unbounded"):
        solve_lp([1, 0], [[1, -1]], [1])


def test_infeasible_raises():
    with pytest.raises(SolverError, match="infeasible"):
        solve_lp([1, 1], [[1, 1], [1, 1]], [1, 2])


def test_degenerate_cycling_example_terminates():
    # Beale's classic cycling instance (standard form with slacks).
    c = [0.75, -150, 0.02, -6, 0, 0, 0]
    A = [
        [0.25, -60, -0.04, 9, 1, 0, 0],
        [0.5, -90, -0.02, 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ]
    res = solve_lp(c, A, [0, 0, 1])
    assert res.objective == pytest.approx(0.05)


def test_random_lps_match_reference_and_duality():
    rng = np.random.default_rng(2)
    for _ in range(40):
        m, n = rng.integers(2, 6), rng.integers(4, 9)
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(0, 1, n)
        b = A @ x0
        flip = b < 0
        A[flip] *= -1
        b[flip] *= -1
        c = rng.normal(size=n)
        ref = linprog(-c, A_eq=A, b_eq=b, bounds=[(0, 10)] * n)
        if not ref.success:
            continue
        # add box constraints as slack rows to keep the LP bounded
        A_box = np.hstack([np.vstack([A, np.eye(n)]), np.vstack([np.zeros((m, n)), np.eye(n)])])
        b_box = np.concatenate([b, np.full(n, 10.0)])
        c_box = np.concatenate([c, np.zeros(n)])
        res = solve_lp(c_box, A_box, b_box)
        assert res.objective == pytest.approx(-ref.fun, abs=1e-8)
        assert A_box @ res.x == pytest.approx(b_box, abs=1e-9)
        assert res.y @ b_box == pytest.approx(res.objective, abs=1e-8)


def test_deterministic():
    rng = np.random.default_rng(9)
    A = np.abs(rng.normal(size=(4, 7)))
    b = np.ones(4)
    c = rng.normal(size=7)
    r1, r2 = solve_lp(c, A, b), solve_lp(c, A, b)
    assert r1.basis == r2.basis and r1.pivots == r2.pivots
    assert r1.x.tobytes() == r2.x.tobytes() and r1.y.tobytes() == r2.y.tobytes()
