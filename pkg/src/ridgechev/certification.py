"""Optimality certificates: closed extremal paths and closed-path lower bounds.

Alternation is mechanised by a *state graph*. A state ``(i, t)`` means "at
point ``i``, having arrived along an edge of type ``t``"; it links to every
``(k, 3 - t)`` with ``k != i`` on the same direction-``(3 - t)`` level as
``i``. A cycle of states is a closed path: types alternate, so its length is
even and the wrap-around edge continues the alternation.

For any closed path ``q`` of length ``2n`` and any ridge sum ``G``,

    |sum_i (-1)**i f(q_i)| = |sum_i (-1)**i (f - G)(q_i)| <= 2n ||f - G||,

so ``|l_q(f)|`` bounds the best error from below, with equality when the
residual of ``G`` alternates at its norm along ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CorruptDualError
from .geometry import LevelStructure, PointSet
from .paths import ClosedPath, Path, PathError, alternating_sum, path_functional, validate_path
from .ridge_space import Residual
from .solver import DualWitness


@dataclass(frozen=True)
class Certificate:
    path: ClosedPath
    deviation: float
    sign_pattern: int

    def to_dict(self, verified: Optional[bool] = None) -> dict:
        return {
            "path": self.path.to_dict(),
            "deviation": self.deviation,
            "sign_pattern": self.sign_pattern,
            "verified": verified,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        p = Path.from_dict(data["path"])
        return cls(ClosedPath(p.indices, p.start_type), float(data["deviation"]), int(data["sign_pattern"]))


@dataclass
class Verification:
    ok: bool
    reason: str
    functional: float = float("nan")
    norm: float = float("nan")
    marginal: bool = False

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "reason": self.reason,
            "path_functional": self.functional,
            "residual_norm": self.norm,
            "marginal": self.marginal,
        }


def _alternation_failure(path: Path, r: np.ndarray, norm: float, deviation: float, sign: int, eps: float):
    if abs(deviation - norm) > eps:
        return f"deviation {deviation!r} differs from residual norm {norm!r}"
    for pos, i in enumerate(path.indices):
        target = sign * (-1) ** pos * norm
        if abs(r[i] - target) > eps:
            return f"residual does not alternate at the norm: position {pos + 1} (point {i}) has {r[i]!r}, expected {target!r}"
    return None


def verify_certificate(cert: Certificate, res: Residual, levels: LevelStructure,
                       values: Optional[Sequence[float]] = None, eps_ext: Optional[float] = None) -> Verification:
    """Check a certificate against the residual of a candidate approximation.

    Passing means the path is a closed path and the residual equals
    ``sign_pattern * (-1)**(i-1) * ||r||`` at its ``i``-th point, which proves
    the candidate optimal. Failing at ``eps_ext`` but passing at
    ``10 * eps_ext`` is reported as ``marginal``.
    """
    eps = res.eps_ext if eps_ext is None else eps_ext
    try:
        path = validate_path(cert.path.indices, cert.path.start_type, levels)
    except PathError as exc:
        return Verification(False, str(exc), norm=res.norm)
    try:
        validate_path(path.indices, path.start_type, levels, closed=True)
    except PathError as exc:
        return Verification(False, f"not closed: {exc}", norm=res.norm)
    F = res.r if values is None else np.asarray(values, dtype=float)
    functional = abs(alternating_sum(path, F)) / len(path)
    if cert.sign_pattern not in (1, -1):
        return Verification(False, f"sign_pattern must be +1 or -1, got {cert.sign_pattern!r}", functional, res.norm)
    if res.norm <= 0:
        return Verification(False, "zero residual needs no path certificate", functional, res.norm)
    failure = _alternation_failure(path, res.r, res.norm, cert.deviation, cert.sign_pattern, eps)
    if failure is None:
        return Verification(True, "ok", functional, res.norm)
    marginal = _alternation_failure(path, res.r, res.norm, cert.deviation, cert.sign_pattern, 10 * eps) is None
    return Verification(False, failure, functional, res.norm, marginal=marginal)


def _certificate(states: Sequence[tuple], res: Residual) -> Certificate:
    """Turn a cycle of states ``(point, arrival type)`` into a certificate."""
    indices = tuple(p for p, _ in states)
    start_type = 3 - states[0][1]
    first = indices[0]
    sign = 1 if res.r[first] > 0 else -1
    return Certificate(ClosedPath(indices, start_type), res.norm, sign)


@dataclass
class StateGraph:
    """Alternation graph on states ``(point, arrival type)``.

    ``allowed`` restricts the points; with ``signs`` given, an edge also
    requires opposite signs at its endpoints.
    """

    levels: LevelStructure
    allowed: Optional[Sequence[int]] = None
    signs: Optional[np.ndarray] = None
    _adj: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pts = range(self.levels.n_points) if self.allowed is None else sorted(set(self.allowed))
        keep = set(pts)
        self.nodes = [(i, t) for i in pts for t in (1, 2)]
        for i, t in self.nodes:
            nt = 3 - t
            fiber = self.levels.fiber(nt, self.levels.level_of(i, nt))
            succ = []
            for k in fiber:
                if k == i or k not in keep:
                    continue
                if self.signs is not None and self.signs[k] == self.signs[i]:
                    continue
                succ.append((k, nt))
            self._adj[(i, t)] = succ

    def successors(self, state: tuple) -> list:
        return self._adj[state]

    def edges(self):
        for s in self.nodes:
            for d in self._adj[s]:
                yield s, d


def _find_cycle(graph: StateGraph) -> Optional[list]:
    """First cycle met by depth-first search in ascending state order."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {s: WHITE for s in graph.nodes}
    for root in graph.nodes:
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(graph.successors(root)))]
        on_stack = [root]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = BLACK
                stack.pop()
                on_stack.pop()
                continue
            if colour[nxt] == GREY:
                return on_stack[on_stack.index(nxt):]
            if colour[nxt] == WHITE:
                colour[nxt] = GREY
                stack.append((nxt, iter(graph.successors(nxt))))
                on_stack.append(nxt)
    return None


def find_extremal_closed_path(res: Residual, levels: LevelStructure,
                              eps_ext: Optional[float] = None) -> Optional[Certificate]:
    """Search for a closed path along which the residual alternates at its norm."""
    if res.norm <= 0:
        return None
    eps = res.eps_ext if eps_ext is None else eps_ext
    extremal = [i for i in range(levels.n_points) if abs(res.r[i]) >= res.norm - eps]
    graph = StateGraph(levels, allowed=extremal, signs=np.sign(res.r))
    cycle = _find_cycle(graph)
    if cycle is None:
        return None
    return _certificate(cycle, res)


def certificate_from_dual(dw: DualWitness, res: Residual, levels: LevelStructure,
                          tol: float = 1e-10) -> Certificate:
    """Walk the dual support, alternating directions and weight signs.

    From a positively weighted point the zero net weight of its direction-1
    fiber forces a negatively weighted point on that fiber; from there the
    direction-2 fiber forces a positive one, and so on. On a finite set a
    state repeats; the cycle part of the walk is returned.
    """
    w = dw.weights
    if dw.interpolation or not np.any(w):
        raise CorruptDualError("corrupt dual: empty witness")
    bad = dw.violations(levels, tol=tol)
    if bad:
        raise CorruptDualError("corrupt dual: " + "; ".join(bad))
    plus = dw.support_plus
    if not plus:
        raise CorruptDualError("corrupt dual: no positive weight")
    i = plus[0]
    t = 1
    seen = {}
    walk = []
    while (i, t) not in seen:
        seen[(i, t)] = len(walk)
        walk.append((i, t))
        sign = 1.0 if w[i] > 0 else -1.0
        fiber = levels.fiber(t, levels.level_of(i, t))
        opposite = [k for k in fiber if k != i and sign * w[k] < -tol]
        if not opposite:
            raise CorruptDualError(f"corrupt dual: direction-{t} fiber of point {i} has no opposite weight")
        i = min(opposite)
        t = 3 - t
    # walk entries carry the type of the edge leaving the point; states are
    # keyed by arrival type.
    states = [(p, 3 - tt) for p, tt in walk[seen[(i, t)]:]]
    return _certificate(states, res)


@dataclass(frozen=True)
class LowerBoundResult:
    path: Optional[ClosedPath]
    bound: float
    iterations: int
    bracket: tuple


def _positive_cycle(graph: StateGraph, f: np.ndarray, b: float, sign: int, eps: float) -> Optional[list]:
    """Bellman-Ford style search for a cycle of positive total weight.

    Entering state ``(k, t)`` earns ``s_t f_k - b`` with ``s_1 = sign`` and
    ``s_2 = -sign``.
    """
    nodes = graph.nodes
    index = {s: n for n, s in enumerate(nodes)}
    gain = np.array([(sign if t == 1 else -sign) * f[k] - b for k, t in nodes])
    edges = [(index[s], index[d]) for s, d in graph.edges()]
    if not edges:
        return None
    dist = np.zeros(len(nodes))
    pred = [-1] * len(nodes)
    last = -1
    for _ in range(len(nodes)):
        last = -1
        for a, c in edges:
            cand = dist[a] + gain[c]
            if cand > dist[c] + eps:
                dist[c] = cand
                pred[c] = a
                last = c
        if last < 0:
            return None
    node = last
    for _ in range(len(nodes)):
        node = pred[node]
    cycle = [node]
    cur = pred[node]
    while cur != node:
        cycle.append(cur)
        cur = pred[cur]
    cycle.reverse()
    return [nodes[n] for n in cycle]


def _cycle_path(states: Sequence[tuple]) -> ClosedPath:
    return ClosedPath(tuple(p for p, _ in states), 3 - states[0][1])


def max_mean_alternating_cycle(ps: PointSet, levels: LevelStructure,
                               tol_bound: Optional[float] = None) -> LowerBoundResult:
    """Largest ``|l_q(f)|`` over closed paths ``q``, by bisection on the mean.

    For a trial level ``b`` a positive cycle of the state graph with gains
    ``+-f - b`` exists iff some closed path has ``|l_q(f)| > b``. Each cycle
    found raises the lower end of the bracket to its exact functional value.
    """
    f = ps.values
    spread = float(np.max(f) - np.min(f))
    tol = 1e-9 * (1.0 + spread) if tol_bound is None else float(tol_bound)
    eps = 1e-13 * (1.0 + spread)
    graph = StateGraph(levels)
    lo, hi = 0.0, spread
    best = None
    iterations = 0

    def probe(b):
        for sign in (1, -1):
            cyc = _positive_cycle(graph, f, b, sign, eps)
            if cyc is not None:
                path = _cycle_path(cyc)
                return path, abs(path_functional(path, f))
        return None

    while hi - lo >= tol:
        iterations += 1
        mid = lo + (hi - lo) / 2
        found = probe(mid)
        if found is None:
            hi = mid
        else:
            path, value = found
            if value <= lo:
                # Rounding produced a cycle no better than the bracket floor.
                hi = mid
                continue
            best, lo = path, value
            hi = max(hi, lo)
    if best is None:
        return LowerBoundResult(None, 0.0, iterations, (lo, hi))
    return LowerBoundResult(best, lo, iterations, (lo, hi))
