import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instance_gen import lattice_instance, random_closed_path, random_ridge_sum, random_walk_path
from ridgechev.geometry import DirectionPair, PointSet, build_levels
from ridgechev.paths import (
    ClosedPath,
    Path,
    PathError,
    functional_norm,
    is_closed,
    near_annihilation_bound,
    odd_even_disjoint,
    path_functional,
    validate_path,
)
from ridgechev.ridge_space import RidgeSum, evaluate_all, residual

# unit square indices: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
CYCLE = (0, 1, 3, 2)


def test_square_zigzag_is_valid(square):
    _, _, levels = square
    path = validate_path(CYCLE, 1, levels)
    assert path.indices == CYCLE


def test_no_shared_level_is_invalid(square):
    _, _, levels = square
    with pytest.raises(PathError) as exc:
        validate_path((0, 3), 1, levels)
    assert exc.value.edge == 0
    with pytest.raises(PathError):
        validate_path((0, 3), 2, levels)


def test_alternation_violation_pinpoints_edge(square):
    _, _, levels = square
    with pytest.raises(PathError, match="alternation violated") as exc:
        validate_path((0, 1, 0), 1, levels)
    assert exc.value.edge == 1


def test_repeated_consecutive_point_rejected(square):
    _, _, levels = square
    with pytest.raises(PathError):
        validate_path((0, 0), 1, levels)


def test_is_closed_examples(square):
    _, _, levels = square
    assert is_closed(Path(CYCLE, 1), levels)
    assert not is_closed(Path((0, 1, 3), 1), levels)
    # collinear staircase on a line: x, y, x links but no wrap edge
    ps = PointSet([[0, 0], [0, 1], [1, 1], [1, 2]], np.zeros(4))
    lv = build_levels(ps, DirectionPair([1, 0], [0, 1]))
    stair = validate_path((0, 1, 2, 3), 1, lv)
    assert not is_closed(stair, lv)
    with pytest.raises(PathError, match="not closed"):
        validate_path((0, 1, 3), 1, levels, closed=True)


def test_validate_closed_returns_closed_path(square):
    _, _, levels = square
    assert isinstance(validate_path(CYCLE, 1, levels, closed=True), ClosedPath)


def test_path_functional_square(square):
    # F in path order (0,1,0,1): (1/4)(-0 + 1 - 0 + 1)
    q = Path(CYCLE, 1)
    F = np.zeros(4)
    F[[1, 2]] = 1.0
    assert path_functional(q, F) == 0.5


def test_path_functional_constant_even_length(square):
    assert path_functional(Path(CYCLE, 1), np.full(4, 3.7)) == 0.0


def test_path_functional_ignores_start_type():
    F = np.array([0.3, -1.2, 2.5, 0.7])
    assert path_functional(Path((0, 1, 2), 1), F) == path_functional(Path((0, 1, 2), 2), F)


def test_single_point_path():
    q = Path((2,), 1)
    assert path_functional(q, [1.0, 2.0, 5.0]) == -5.0


@pytest.mark.parametrize(
    "indices, expected",
    [((0, 1, 2, 3), 1.0), ((0, 1, 0, 2), 1.0), ((0, 1, 2, 0, 3), 3 / 5), ((0, 1, 0, 1), 1.0), ((0, 1, 2, 0, 1, 2), 0.0)],
)
def test_functional_norm(indices, expected):
    assert functional_norm(Path(indices, 1)) == pytest.approx(expected, abs=1e-15)


def test_functional_norm_lower_bound_by_evaluation():
    # |l_q(F)| <= ||l_q|| for |F| <= 1, attained by F = sign of the net coefficient
    q = Path((0, 1, 2, 0, 3), 1)
    F = np.array([0.0, 1.0, -1.0, -1.0])  # point 0 cancels; others follow signs
    assert abs(path_functional(q, F)) == pytest.approx(functional_norm(q))


def test_near_annihilation_examples(square):
    ps, _, levels = square
    G = RidgeSum([0.3, -2.0], [1.5, 0.25])
    lhs, rhs = near_annihilation_bound(Path(CYCLE, 1), G, levels)
    assert lhs == 0.0 and rhs > 0
    lhs, rhs = near_annihilation_bound(Path((0, 1), 1), G, levels)
    assert lhs <= rhs


@st.composite
def lattice_with_paths(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    ps, dirs = lattice_instance(rng, draw(st.sampled_from([2, 3])))
    return rng, ps, build_levels(ps, dirs)


@given(lattice_with_paths())
@settings(max_examples=150, deadline=None)
def test_closed_path_annihilates_ridge_sums(data):
    rng, ps, levels = data
    q = random_closed_path(rng, levels)
    if q is None:
        return
    assert is_closed(q, levels)
    validate_path(q.indices, q.start_type, levels, closed=True)
    G = random_ridge_sum(rng, levels, scale=100.0)
    s = np.dot(q.signs(), evaluate_all(G, levels)[list(q.indices)])
    assert abs(s) <= 1e-10 * (1 + np.sum(np.abs(G.u)) + np.sum(np.abs(G.v)))


@given(lattice_with_paths())
@settings(max_examples=150, deadline=None)
def test_closed_path_lower_bound_chain(data):
    rng, ps, levels = data
    q = random_closed_path(rng, levels)
    if q is None:
        return
    G = random_ridge_sum(rng, levels)
    r = residual(ps, G, levels)
    lf = path_functional(q, ps.values)
    assert abs(abs(lf) - abs(path_functional(q, r.r))) <= 1e-12
    assert abs(lf) <= r.norm + 1e-12


@given(lattice_with_paths(), st.integers(1, 12))
@settings(max_examples=150, deadline=None)
def test_near_annihilation_inequality(data, length):
    rng, ps, levels = data
    q = random_walk_path(rng, levels, length)
    G = random_ridge_sum(rng, levels, scale=10.0)
    lhs, rhs = near_annihilation_bound(q, G, levels)
    assert lhs <= rhs + 1e-12 * rhs


@given(lattice_with_paths(), st.integers(1, 12))
@settings(max_examples=150, deadline=None)
def test_functional_norm_properties(data, length):
    rng, ps, levels = data
    q = random_walk_path(rng, levels, length)
    norm = functional_norm(q)
    assert norm <= 1.0
    assert (norm == 1.0) == odd_even_disjoint(q)
