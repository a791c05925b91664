import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgechev.errors import InputError
from ridgechev.geometry import DirectionPair, PointSet, build_levels
from ridgechev.ridge_space import RidgeSum, evaluate, evaluate_all, residual, sup_norm_parts


def test_evaluate_examples(square):
    ps, _, levels = square
    G = RidgeSum([0, 1], [0, 1])
    assert evaluate(G, levels, 3) == 2.0
    assert all(evaluate(RidgeSum.zeros(levels), levels, i) == 0 for i in range(4))
    assert evaluate_all(RidgeSum.constant(levels, 2.5), levels).tolist() == [2.5] * 4


def test_evaluate_index_out_of_range(square):
    _, _, levels = square
    with pytest.raises(InputError):
        evaluate(RidgeSum.zeros(levels), levels, 4)


def test_residual_of_member_is_zero(square):
    ps, _, levels = square
    f = ps.points[:, 0] + ps.points[:, 1]
    res = residual(ps.with_values(f), RidgeSum([0, 1], [0, 1]), levels)
    assert res.norm == 0
    assert res.argmax == (0, 1, 2, 3)


def test_residual_2x2_is_optimal_by_grid_search(square):
    ps, _, levels = square
    res = residual(ps, RidgeSum.constant(levels, 0.5), levels)
    assert res.r.tolist() == [-0.5, 0.5, 0.5, -0.5]
    assert res.norm == 0.5
    # Independent check: no tables on a grid beat 0.5 (gauge v[0] = 0).
    grid = np.linspace(-1, 2, 61)
    best = min(
        max(abs(0 - u0), abs(1 - u0 - v1), abs(1 - u1), abs(0 - u1 - v1))
        for u0, u1, v1 in itertools.product(grid, grid, grid)
    )
    assert best == pytest.approx(0.5, abs=1e-12)


def test_residual_zero_approximant(square):
    ps, _, levels = square
    res = residual(ps, RidgeSum.zeros(levels), levels)
    assert res.r.tolist() == ps.values.tolist()
    assert res.norm == 1.0
    assert res.argmax == (1, 2)


@pytest.mark.parametrize("u, v, expected", [([-3, 1], [0, 2], (3, 2)), ([0, 0], [0, 0], (0, 0)), ([5], [-5], (5, 5))])
def test_sup_norm_parts(u, v, expected):
    assert sup_norm_parts(RidgeSum(u, v)) == expected


def _grid_levels(m1, m2):
    pts = np.array([[i, j] for i in range(m1) for j in range(m2)], dtype=float)
    ps = PointSet(pts, np.zeros(len(pts)))
    return ps, build_levels(ps, DirectionPair([1, 0], [0, 1]))


tables = st.integers(1, 5).flatmap(lambda m: st.tuples(
    st.just(m),
    st.lists(st.floats(-100, 100), min_size=m, max_size=m),
    st.lists(st.floats(-100, 100), min_size=4, max_size=4),
    st.lists(st.floats(-100, 100), min_size=m, max_size=m),
    st.lists(st.floats(-100, 100), min_size=4, max_size=4),
    st.floats(-10, 10), st.floats(-10, 10),
))


@given(tables)
@settings(max_examples=200)
def test_linearity(data):
    m, u1, v1, u2, v2, alpha, beta = data
    _, levels = _grid_levels(m, 4)
    G, H = RidgeSum(u1, v1), RidgeSum(u2, v2)
    combo = evaluate_all(alpha * G + beta * H, levels)
    direct = alpha * evaluate_all(G, levels) + beta * evaluate_all(H, levels)
    scale = 1 + np.abs(alpha * evaluate_all(G, levels)) + np.abs(beta * evaluate_all(H, levels))
    assert np.all(np.abs(combo - direct) <= 1e-12 * scale)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
       st.lists(st.floats(-100, 100), min_size=2, max_size=2),
       st.floats(-50, 50))
def test_shift_invariance(u, v, c):
    _, levels = _grid_levels(3, 2)
    G = RidgeSum(u, v)
    assert np.allclose(evaluate_all(G.shifted(c), levels), evaluate_all(G, levels), rtol=0, atol=1e-12)


def test_normalized_pins_min_v_to_zero():
    G = RidgeSum([1.0, 2.0], [3.0, -1.0, 4.0]).normalized()
    assert G.v.min() == 0.0
    assert G.u.tolist() == [0.0, 1.0]


def test_residual_norm_zero_iff_equal(square):
    ps, _, levels = square
    G = RidgeSum([0.25, -1.0], [2.0, 0.5])
    f = evaluate_all(G, levels)
    assert residual(ps.with_values(f), G, levels).norm <= 1e-15
    f2 = f.copy()
    f2[2] += 1e-9
    assert residual(ps.with_values(f2), G, levels).norm > 1e-15
