"""Best uniform approximation by sums of two ridge functions on finite sets,
with closed-path optimality certificates."""

__version__ = "0.1.0"

from .certification import (
    Certificate,
    LowerBoundResult,
    StateGraph,
    Verification,
    certificate_from_dual,
    find_extremal_closed_path,
    max_mean_alternating_cycle,
    verify_certificate,
)
from .errors import CorruptDualError, InputError, OracleCapError, RidgechevError, SolverError
from .geometry import DirectionPair, LevelStructure, PointSet, build_levels, detect_parallel, project
from .paths import (
    ClosedPath,
    Path,
    PathError,
    functional_norm,
    is_closed,
    near_annihilation_bound,
    path_functional,
    validate_path,
)
from .ridge_space import Residual, RidgeSum, evaluate, evaluate_all, residual, sup_norm_parts
from .solver import (
    DualWitness,
    MinimaxSolution,
    alternating_solver,
    brute_force_oracle,
    solve_minimax,
)
