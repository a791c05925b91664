"""Command-line front end.

    ridgechev solve   INSTANCE [--a1 .. --a2 ..] [--oracle]
    ridgechev certify INSTANCE --g0 TABLES.json
    ridgechev bound   INSTANCE
    ridgechev verify  INSTANCE --certificate CERT.json [--g0 TABLES.json]

Reports go to stdout as JSON with a fixed key order and floats printed with
17 significant digits. Exit codes: 0 ok, 2 input error, 3 verification
failure, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import glob as globmod
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .certification import (
    Certificate,
    certificate_from_dual,
    find_extremal_closed_path,
    max_mean_alternating_cycle,
    verify_certificate,
)
from .errors import CorruptDualError, InputError, OracleCapError, SolverError
from .geometry import DirectionPair, LevelStructure, PointSet, build_levels
from .paths import PathError
from .ridge_space import RidgeSum, default_eps_ext, residual
from .solver import alternating_solver, brute_force_oracle, solve_minimax

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_INTERNAL = 4

GAP_TOL = 1e-9
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class InstanceFile:
    points: PointSet
    directions: DirectionPair
    tau: Optional[float] = None
    eps_ext: Optional[float] = None
    source: str = ""


@dataclass(frozen=True)
class Options:
    tau: Optional[float] = None
    eps_ext: Optional[float] = None
    tau_angle: float = 1e-9
    oracle: bool = False
    max_sweeps: int = 10_000
    tol_bound: Optional[float] = None


class CommandFailure(Exception):
    def __init__(self, code: int, kind: str, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.report = report


def parse_vector(text: str, name: str) -> list:
    try:
        vec = [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"{name}: expected comma-separated reals, got {text!r}") from None
    if not all(math.isfinite(x) for x in vec):
        raise InputError(f"{name}: components must be finite")
    return vec


def _read_csv(path: str):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[-1] != "f":
        raise InputError(f"{path}: line 1: header must be 'x1,...,xd,f'")
    d = len(header) - 1
    points, values, lines = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 1:
            raise InputError(f"{path}: line {lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            nums = [float(c) for c in row]
        except ValueError:
            raise InputError(f"{path}: line {lineno}: malformed number in {row!r}") from None
        if not all(math.isfinite(x) for x in nums):
            raise InputError(f"{path}: line {lineno}: non-finite value")
        points.append(nums[:-1])
        values.append(nums[-1])
        lines.append(lineno)
    if not points:
        raise InputError(f"{path}: no data rows")
    seen = {}
    for p, lineno in zip(points, lines):
        key = tuple(p)
        if key in seen:
            raise InputError(f"{path}: duplicate point on lines {seen[key]} and {lineno}")
        seen[key] = lineno
    return points, values, {}


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    for key in ("points", "values"):
        if key not in data:
            raise InputError(f"{path}: missing field {key!r}")
    points, values = data["points"], data["values"]
    if not isinstance(points, list) or not points or not all(isinstance(p, list) for p in points):
        raise InputError(f"{path}: 'points' must be a non-empty list of coordinate lists")
    d = len(points[0])
    for n, p in enumerate(points):
        if len(p) != d:
            raise InputError(f"{path}: point {n} has {len(p)} coordinates, expected {d}")
    if not isinstance(values, list) or len(values) != len(points):
        raise InputError(f"{path}: 'values' must list one value per point")
    try:
        pts = [[float(x) for x in p] for p in points]
        vals = [float(x) for x in values]
    except (TypeError, ValueError):
        raise InputError(f"{path}: points and values must be numbers") from None
    seen = {}
    for n, p in enumerate(pts):
        if tuple(p) in seen:
            raise InputError(f"{path}: duplicate point at entries {seen[tuple(p)]} and {n}")
        seen[tuple(p)] = n
    return pts, vals, data


def ingest(path: str, fmt: Optional[str] = None, a1: Optional[str] = None, a2: Optional[str] = None,
           tau: Optional[float] = None, eps_ext: Optional[float] = None) -> InstanceFile:
    """Read a CSV or JSON instance. Direction flags override JSON fields."""
    if fmt is None:
        fmt = "json" if path.lower().endswith(".json") else "csv"
    try:
        if fmt == "csv":
            points, values, extra = _read_csv(path)
        elif fmt == "json":
            points, values, extra = _read_json(path)
        else:
            raise InputError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    dirs = []
    for name, flag in (("a1", a1), ("a2", a2)):
        if flag is not None:
            dirs.append(parse_vector(flag, name))
        elif name in extra:
            vec = extra[name]
            if not isinstance(vec, list):
                raise InputError(f"{path}: field {name!r} must be a list")
            dirs.append([float(x) for x in vec])
        else:
            raise InputError(f"{path}: missing direction {name!r} (field {name!r} or flag --{name})")
    if not all(math.isfinite(x) for x in values) or not all(math.isfinite(x) for p in points for x in p):
        raise InputError(f"{path}: non-finite value")
    ps = PointSet(np.array(points), np.array(values))
    directions = DirectionPair(dirs[0], dirs[1])
    if directions.dimension != ps.dimension:
        raise InputError(f"{path}: directions are {directions.dimension}-dimensional, points {ps.dimension}-dimensional")
    if tau is None and extra.get("tau") is not None:
        tau = float(extra["tau"])
    if eps_ext is None and extra.get("eps_ext") is not None:
        eps_ext = float(extra["eps_ext"])
    return InstanceFile(ps, directions, tau, eps_ext, path)


def _tables_from_file(path: str) -> RidgeSum:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    if isinstance(data, dict) and isinstance(data.get("g0"), dict):
        data = data["g0"]
    if not isinstance(data, dict) or "u" not in data or "v" not in data:
        raise InputError(f"{path}: expected an object with 'u' and 'v' tables")
    return RidgeSum(data["u"], data["v"])


def _certificate_from_file(path: str) -> tuple:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    tables = None
    if isinstance(data, dict) and isinstance(data.get("g0"), dict):
        tables = RidgeSum(data["g0"]["u"], data["g0"]["v"])
    if isinstance(data, dict) and isinstance(data.get("certificate"), dict):
        data = data["certificate"]
    try:
        cert = Certificate.from_dict(data)
    except (KeyError, TypeError, ValueError, PathError) as exc:
        raise InputError(f"{path}: malformed certificate: {exc}") from None
    return cert, tables


def _levels(inst: InstanceFile, opts: Options) -> LevelStructure:
    tau = opts.tau if opts.tau is not None else inst.tau
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        levels = build_levels(inst.points, inst.directions, tau, opts.tau_angle)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return levels


def _digest(inst: InstanceFile, levels: LevelStructure) -> dict:
    return {
        "points": len(inst.points),
        "dimension": inst.points.dimension,
        "levels1": levels.n_levels(1),
        "levels2": levels.n_levels(2),
        "parallel": levels.parallel,
    }


def _tolerances(levels: LevelStructure, eps_ext: float, tol_bound: Optional[float], opts: Options) -> dict:
    return {
        "tau1": levels.tau[0],
        "tau2": levels.tau[1],
        "cluster_width1": levels.width[0],
        "cluster_width2": levels.width[1],
        "tau_angle": opts.tau_angle,
        "eps_ext": eps_ext,
        "tol_bound": tol_bound,
        "gap_tol": GAP_TOL,
    }


def _g0(G: RidgeSum, levels: LevelStructure) -> dict:
    return {"u": G.u.tolist(), "v": G.v.tolist(), "levels1": levels.levels1.tolist(), "levels2": levels.levels2.tolist()}


def _bound_section(ps: PointSet, levels: LevelStructure, opts: Options) -> tuple:
    spread = float(np.max(ps.values) - np.min(ps.values))
    tol_bound = 1e-9 * (1.0 + spread) if opts.tol_bound is None else opts.tol_bound
    lb = max_mean_alternating_cycle(ps, levels, tol_bound)
    section = {
        "bound": lb.bound,
        "path": lb.path.to_dict() if lb.path is not None else None,
        "iterations": lb.iterations,
    }
    return lb, section, tol_bound


def run_solve(inst: InstanceFile, opts: Options = Options()) -> tuple:
    """LP solve, certificate from the dual, verification and lower bound."""
    levels = _levels(inst, opts)
    ps = inst.points
    oracle_error = None
    if opts.oracle:
        oracle_error = brute_force_oracle(ps, levels)
    sol = solve_minimax(ps, levels)
    eps_ext = opts.eps_ext if opts.eps_ext is not None else inst.eps_ext
    if eps_ext is None:
        eps_ext = default_eps_ext(sol.error)
    res = residual(ps, sol.G0, levels, eps_ext)
    heuristic = alternating_solver(ps, levels, opts.max_sweeps)
    lb, bound, tol_bound = _bound_section(ps, levels, opts)

    cert = None
    verification = None
    failure = None
    if not sol.interpolation:
        try:
            cert = certificate_from_dual(sol.dual, res, levels)
        except CorruptDualError as exc:
            failure = (EXIT_INTERNAL, "corrupt_dual", str(exc))
        else:
            verification = verify_certificate(cert, res, levels, ps.values)
            if not verification.ok:
                failure = (EXIT_VERIFY, "verification_failed", verification.reason)
    gap = sol.error - lb.bound
    report = {
        "command": "solve",
        "tool_version": __version__,
        "instance": _digest(inst, levels),
        "tolerances": _tolerances(levels, eps_ext, tol_bound, opts),
        "error": sol.error,
        "interpolation": sol.interpolation,
        "g0": _g0(sol.G0, levels),
        "certificate": cert.to_dict(verification.ok) if cert is not None else None,
        "verification": verification.to_dict() if verification is not None else None,
        "lower_bound": bound,
        "gap": gap,
        "diagnostics": {
            "pivots": sol.pivots,
            "sweeps": heuristic.sweeps,
            "alternating_error": heuristic.error,
            "oracle_error": oracle_error,
        },
    }
    if failure is None and gap < -GAP_TOL:
        failure = (EXIT_INTERNAL, "invariant_breach", f"lower bound {lb.bound!r} exceeds error {sol.error!r}")
    if failure is None and oracle_error is not None and abs(oracle_error - sol.error) > ORACLE_TOL:
        failure = (EXIT_INTERNAL, "invariant_breach", f"oracle error {oracle_error!r} disagrees with LP error {sol.error!r}")
    if failure is not None:
        raise CommandFailure(*failure, report=report)
    return report, EXIT_OK


def run_certify(inst: InstanceFile, G: RidgeSum, opts: Options = Options()) -> tuple:
    """Search a closed extremal path for the residual of user-supplied tables."""
    levels = _levels(inst, opts)
    ps = inst.points
    G.check_shape(levels)
    eps_ext = opts.eps_ext if opts.eps_ext is not None else inst.eps_ext
    res = residual(ps, G, levels, eps_ext)
    cert = find_extremal_closed_path(res, levels) if res.norm > 0 else None
    verification = verify_certificate(cert, res, levels, ps.values) if cert is not None else None
    report = {
        "command": "certify",
        "tool_version": __version__,
        "instance": _digest(inst, levels),
        "tolerances": _tolerances(levels, res.eps_ext, None, opts),
        "error": res.norm,
        "interpolation": res.norm == 0,
        "g0": _g0(G, levels),
        "certificate": cert.to_dict(verification.ok) if cert is not None else None,
        "verification": verification.to_dict() if verification is not None else None,
    }
    if res.norm > 0 and (cert is None or not verification.ok):
        reason = "no closed extremal path for this residual" if cert is None else verification.reason
        raise CommandFailure(EXIT_VERIFY, "verification_failed", reason, report=report)
    return report, EXIT_OK


def run_bound(inst: InstanceFile, opts: Options = Options()) -> tuple:
    levels = _levels(inst, opts)
    _, bound, tol_bound = _bound_section(inst.points, levels, opts)
    report = {
        "command": "bound",
        "tool_version": __version__,
        "instance": _digest(inst, levels),
        "tolerances": _tolerances(levels, None, tol_bound, opts),
        "lower_bound": bound,
    }
    return report, EXIT_OK


def run_verify(inst: InstanceFile, cert: Certificate, G: RidgeSum, opts: Options = Options()) -> tuple:
    levels = _levels(inst, opts)
    ps = inst.points
    G.check_shape(levels)
    eps_ext = opts.eps_ext if opts.eps_ext is not None else inst.eps_ext
    res = residual(ps, G, levels, eps_ext)
    verification = verify_certificate(cert, res, levels, ps.values)
    report = {
        "command": "verify",
        "tool_version": __version__,
        "instance": _digest(inst, levels),
        "tolerances": _tolerances(levels, res.eps_ext, None, opts),
        "error": res.norm,
        "certificate": cert.to_dict(verification.ok),
        "verification": verification.to_dict(),
    }
    if not verification.ok:
        raise CommandFailure(EXIT_VERIFY, "verification_failed", verification.reason, report=report)
    return report, EXIT_OK


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with 17-significant-digit floats and insertion-ordered keys."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _error_report(kind: str, message: str, report: Optional[dict] = None) -> dict:
    out = {"error": {"kind": kind, "message": message}}
    if report is not None:
        out["report"] = report
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", nargs="?", help="instance file (CSV or JSON)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="input format (default: from the file extension)")
    common.add_argument("--a1", help="direction 1 as comma-separated reals")
    common.add_argument("--a2", help="direction 2 as comma-separated reals")
    common.add_argument("--tau", type=float, default=None, help="level clustering tolerance")
    common.add_argument("--tau-angle", type=float, default=1e-9, help="parallel-direction tolerance")
    common.add_argument("--eps-ext", type=float, default=None, help="extremal-set tolerance")
    common.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    common.add_argument("--max-sweeps", type=int, default=10_000, help="alternating heuristic sweep cap")
    common.add_argument("--tol-bound", type=float, default=None, help="bisection width for the lower bound")
    common.add_argument("--glob", default=None, help="process every file matching this pattern")

    parser = argparse.ArgumentParser(prog="ridgechev",
                                     description="Best uniform approximation by sums of two ridge functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve, certify and bound")
    p = sub.add_parser("certify", parents=[common], help="find a closed extremal path for given tables")
    p.add_argument("--g0", required=True, help="JSON file with 'u' and 'v' tables (or a solve report)")
    sub.add_parser("bound", parents=[common], help="best closed-path lower bound only")
    p = sub.add_parser("verify", parents=[common], help="verify a certificate")
    p.add_argument("--certificate", required=True, help="certificate JSON (or a solve report)")
    p.add_argument("--g0", default=None, help="tables JSON; defaults to the 'g0' of the certificate file")
    return parser


def _run_one(args, path: str) -> tuple:
    opts = Options(tau=args.tau, eps_ext=args.eps_ext, tau_angle=args.tau_angle, oracle=args.oracle,
                   max_sweeps=args.max_sweeps, tol_bound=args.tol_bound)
    try:
        if args.max_sweeps < 1:
            raise InputError("--max-sweeps must be >= 1")
        inst = ingest(path, args.format, args.a1, args.a2)
        if args.command == "solve":
            return run_solve(inst, opts)
        if args.command == "certify":
            return run_certify(inst, _tables_from_file(args.g0), opts)
        if args.command == "bound":
            return run_bound(inst, opts)
        cert, tables = _certificate_from_file(args.certificate)
        if args.g0 is not None:
            tables = _tables_from_file(args.g0)
        if tables is None:
            raise InputError("verify needs --g0 or a certificate file that carries 'g0'")
        return run_verify(inst, cert, tables, opts)
    except CommandFailure as exc:
        return _error_report(exc.kind, str(exc), exc.report), exc.code
    except OracleCapError as exc:
        return _error_report("oracle_cap", str(exc)), EXIT_INPUT
    except InputError as exc:
        return _error_report("input_error", str(exc)), EXIT_INPUT
    except (SolverError, CorruptDualError) as exc:
        return _error_report("internal_error", str(exc)), EXIT_INTERNAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.glob is not None:
        files = sorted(globmod.glob(args.glob))
        if not files:
            print(dumps(_error_report("input_error", f"no files match {args.glob!r}")))
            return EXIT_INPUT
        batch = []
        code = EXIT_OK
        for path in files:
            report, rc = _run_one(args, path)
            batch.append({"file": path, "exit_code": rc, "report": report})
            code = max(code, rc)
        print(dumps({"batch": batch}))
        return code
    if args.instance is None:
        print(dumps(_error_report("input_error", "an instance file or --glob is required")))
        return EXIT_INPUT
    report, code = _run_one(args, args.instance)
    print(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
