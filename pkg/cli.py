"""
Command-line entry point: gen, solve, verify, bench, gauge, render.

Exit codes: 0 success, 1 input or invariant errors, 2 iteration cap exceeded,
3 infeasible instance, 4 exact oracle over budget.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from baselines import OracleBudget, exact_for_model, greedy_for_model
from bench import BenchSpec, load_spec, run_bench
from config import get_settings
from decomposition import decomposition_to_dict, disjoint_union_decomposition, verify_decomposition
from errors import InvalidParams, InvariantViolation, ParseError, ToolkitError
from feasibility import Solution, coverage_model, is_feasible
from gauge import Gauge, delta, dist_to_convex, nearest_point
from geometry_core import Point, point_from_json, point_to_json, polygon_from_json, scalar_to_str, to_scalar
from instances import (
    BASE_KINDS,
    CoverInstance,
    dumps,
    gen_cover,
    gen_domination,
    instance_hash,
    load,
    make_base,
    verify_pseudodisk_family,
)
from logging_config import configure_logging
from render import render
from solver import SolverConfig, audit_b_local_optimality, local_search

logger = logging.getLogger(__name__)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def _require_input(args) -> str:
    if not args.input:
        raise InvalidParams(f"'{args.command}' needs --in")
    return args.input


def _coordinate(text: str) -> Fraction:
    if "." in text:
        try:
            return Fraction(text)
        except ValueError as e:
            raise ParseError(f"Not a decimal coordinate: {text!r}") from e
    return to_scalar(text)


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"Point must be written as x,y: {text!r}")
    return Point(_coordinate(parts[0].strip()), _coordinate(parts[1].strip()))


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}") from e


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from e


def cmd_gen(args) -> int:
    scale = (args.scale_min, args.scale_max)
    if any(scale) and not all(scale):
        raise InvalidParams("Give both --scale-min and --scale-max")
    if args.problem == "domination":
        kwargs = {"kind": args.kind or "square", "k": args.k, "extent": args.extent, "seed": args.seed}
        if all(scale):
            kwargs["scale_range"] = scale
        instance = gen_domination(args.n, **kwargs)
    else:
        kwargs = {
            "object_kind": args.kind or "homothets",
            "base_kind": args.base_kind,
            "k": args.k,
            "extent": args.extent,
            "seed": args.seed,
            "cover_free": args.cover_free,
        }
        if all(scale):
            kwargs["scale_range"] = scale
        instance = gen_cover(args.n, args.points, **kwargs)
    _emit(dumps(instance), args.out)
    return 0


def cmd_solve(args) -> int:
    instance = load(_require_input(args))
    model = coverage_model(instance)
    trace = None
    if args.algo == "exact":
        solution = exact_for_model(model, OracleBudget.from_settings())
    elif args.algo == "greedy":
        solution = greedy_for_model(model)
    else:
        config = SolverConfig(
            b=args.b,
            epsilon=args.epsilon,
            init=args.init,
            deterministic=not args.randomized,
            seed=args.seed,
        )
        solution, trace = local_search(instance, config)
    if not is_feasible(instance, solution):
        raise InvariantViolation("Solver returned an infeasible solution", algo=args.algo)
    _emit(solution.to_json(instance_hash(instance), include_timing=args.timings), args.out)
    if args.trace and trace is not None:
        Path(args.trace).write_text(json.dumps(trace.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Solved with {args.algo}: size={len(solution)}")
    return 0


def cmd_verify(args) -> int:
    instance = load(_require_input(args))
    if args.decomposition:
        if not isinstance(instance, CoverInstance):
            raise InvalidParams("Decomposition needs a cover instance")
        result = disjoint_union_decomposition(instance.objects)
        report = verify_decomposition(instance.objects, result)
        _emit(json.dumps(decomposition_to_dict(result, report), sort_keys=True, indent=2) + "\n", args.out)
        return 0 if report.passed else 1
    if args.pseudodisks:
        report = verify_pseudodisk_family(instance.polygons)
        doc = {
            "ok": report.ok,
            "pairs_checked": report.pairs_checked,
            "offenders": [
                {"i": o.i, "j": o.j, "crossings": o.crossings, "reason": o.reason} for o in report.offenders
            ],
        }
        _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
        return 0 if report.ok else 1
    if args.solution:
        solution, digest = Solution.from_json(_read_text(args.solution))
        if digest != instance_hash(instance):
            raise InvariantViolation("Solution was computed for a different instance")
        solution.check_bounds(instance.n)
        doc = {"feasible": is_feasible(instance, solution), "size": len(solution)}
        if args.audit_b:
            doc["b_local_optimal"] = audit_b_local_optimality(coverage_model(instance), solution, args.audit_b)
        _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
        return 0 if doc["feasible"] and doc.get("b_local_optimal", True) else 1
    raise InvalidParams("verify needs one of --decomposition, --pseudodisks, --solution")


def cmd_bench(args) -> int:
    spec: BenchSpec = load_spec(args.spec or _require_input(args))
    updates = {}
    if args.workers:
        updates["workers"] = args.workers
    if args.timings:
        updates["include_timings"] = True
    if updates:
        spec = spec.model_copy(update=updates)
    table = run_bench(spec)
    _emit(table.to_text() if args.format == "text" else table.to_json(), args.out)
    return 0


def _gauge_from_args(args) -> Gauge:
    if args.shape:
        data = _read_json(args.shape)
        if not isinstance(data, dict) or "polygon" not in data or "center" not in data:
            raise ParseError("Gauge shape file needs 'polygon' and 'center'")
        return Gauge(polygon_from_json(data["polygon"]), point_from_json(data["center"]))
    return Gauge.from_base(make_base(args.base, args.k))


def cmd_gauge(args) -> int:
    g = _gauge_from_args(args)
    if args.delta:
        p1, p2 = (_parse_point(s) for s in args.delta)
        _emit(scalar_to_str(delta(g, p1, p2)) + "\n", args.out)
        return 0
    if args.dist:
        p = _parse_point(args.dist[0])
        data = _read_json(args.dist[1])
        P = polygon_from_json(data["polygon"] if isinstance(data, dict) else data)
        d = dist_to_convex(g, p, P)
        q = nearest_point(g, p, P)
        _emit(json.dumps({"distance": scalar_to_str(d), "nearest": point_to_json(q)}, sort_keys=True) + "\n", args.out)
        return 0
    raise InvalidParams("gauge needs --delta or --dist")


def cmd_render(args) -> int:
    instance = load(_require_input(args))
    solution = None
    if args.solution:
        solution, _ = Solution.from_json(_read_text(args.solution))
        solution.check_bounds(instance.n)
    decomposition = None
    if args.decomposition:
        if not isinstance(instance, CoverInstance):
            raise InvalidParams("Decomposition needs a cover instance")
        decomposition = disjoint_union_decomposition(instance.objects)
    _emit(render(instance, solution, decomposition), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Random seed")
    common.add_argument("--in", dest="input", help="Input file")
    common.add_argument("--out", help="Output file (stdout when omitted)")
    common.add_argument("--log-level", help="Overrides LOG_LEVEL")

    parser = argparse.ArgumentParser(prog="geols", description="Local search for geometric domination and cover")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="Generate a seeded instance")
    p.add_argument("--problem", choices=["domination", "cover"], default="domination")
    p.add_argument("--n", type=int, required=True, help="Number of objects")
    p.add_argument("--points", type=int, default=0, help="Number of points (cover)")
    p.add_argument("--kind", help="Base shape (domination) or object kind (cover)")
    p.add_argument("--base-kind", default="square", choices=BASE_KINDS[:-1])
    p.add_argument("--k", type=int, default=6, help="Vertex count of regular bases")
    p.add_argument("--scale-min")
    p.add_argument("--scale-max")
    p.add_argument("--extent", default="10")
    p.add_argument("--cover-free", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[common], help="Solve an instance")
    p.add_argument("--algo", choices=["local-search", "exact", "greedy"], default="local-search")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--b", type=int)
    group.add_argument("--epsilon")
    p.add_argument("--init", choices=["greedy", "full"], default="greedy")
    p.add_argument("--randomized", action="store_true", help="Seeded candidate order instead of index order")
    p.add_argument("--trace", help="Write the swap trace to this file")
    p.add_argument("--timings", action="store_true", help="Keep wall time in the output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="Check solutions, families and decompositions")
    p.add_argument("--decomposition", action="store_true")
    p.add_argument("--pseudodisks", action="store_true")
    p.add_argument("--solution")
    p.add_argument("--audit-b", type=int, help="Also audit b-local optimality of --solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="Run a benchmark spec")
    p.add_argument("--spec", help="Bench spec JSON (defaults to --in)")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--workers", type=int)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gauge", parents=[common], help="Evaluate the convex distance")
    p.add_argument("--shape", help="JSON file with 'polygon' and 'center'")
    p.add_argument("--base", default="square", choices=BASE_KINDS[:-1])
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--delta", nargs=2, metavar=("P1", "P2"))
    p.add_argument("--dist", nargs=2, metavar=("P", "POLYGON_FILE"))
    p.set_defaults(func=cmd_gauge)

    p = sub.add_parser("render", parents=[common], help="Draw an instance as SVG")
    p.add_argument("--solution")
    p.add_argument("--decomposition", action="store_true")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        configure_logging(args.log_level or settings.log_level, settings.log_file, settings.log_format == "json")
        return args.func(args)
    except ToolkitError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"{args.command} failed: invalid options: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
