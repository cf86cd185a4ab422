from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Any, Callable, Sequence

from tqdm import tqdm

from .config import settings
from .converter import (
    canonical_json,
    emit_curve,
    emit_trace,
    parse_curve,
    parse_trace,
    read_bytes,
    write_bytes,
)
from .dubins import csc_closed_form, normalize, replace_fragment, solve_csc
from .errors import DomainError, InfeasibleError, KCurvesError
from .generator import make_rng, random_curve, random_walk
from .geometry import Config, CsCurve, KappaParams, Point2, self_intersections, subcurve
from .homotopy import build_homotopy, reduce, verify_trace
from .regions import (
    assert_no_curve_in_E,
    build_lens,
    class_count,
    class_label,
    classify_point,
    curve_in_cl_lens,
    curve_in_union,
    labels_for,
    UnionMembership,
)
from .render import render_svg
from .validation import ValidationReport, validate

logger = logging.getLogger("kcurves")


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------


def _floats(text: str, n: int) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def point_arg(text: str) -> Point2:
    return Point2(*_floats(text, 2))


def config_arg(text: str) -> Config:
    x, y, theta = _floats(text, 3)
    return Config(Point2(x, y), theta)


def kappa_arg(text: str) -> KappaParams:
    try:
        return KappaParams(float(text))
    except (ValueError, DomainError) as e:
        raise argparse.ArgumentTypeError(f"invalid kappa {text!r}: {e}") from e


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    if not math.isfinite(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _emit(data: bytes, out: str | None) -> None:
    if out:
        write_bytes(out, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _report_payload(report: ValidationReport) -> dict[str, Any]:
    violations = []
    for v in report.violations:
        item: dict[str, Any] = {"kind": v.kind, "location": v.location, "magnitude": v.magnitude}
        if v.frame is not None:
            item["frame"] = v.frame
        violations.append(item)
    return {
        "valid": report.valid,
        "max_curvature": report.max_curvature,
        "worst_joint_gap": report.worst_joint_gap,
        "violations": violations,
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace) -> int:
    x, y, kappa = args.x, args.y, args.kappa
    d = x.distance(y)
    summary: dict[str, Any] = {
        "d": d,
        "r": kappa.r,
        "class_count": class_count(x, y, kappa),
        "labels": [lab.value for lab in labels_for(x, y, kappa)],
    }
    if summary["class_count"] == 2:
        lens = build_lens(x, y, kappa)
        summary["centers"] = [list(lens.c1), list(lens.c2)]
        summary["points"] = [{"point": list(p), "region": classify_point(lens, p).value} for p in args.point or []]
    elif args.point:
        raise DomainError("point regions need 0 < d < 2r")
    _emit(canonical_json(summary), None)
    return 0


def cmd_label(args: argparse.Namespace) -> int:
    curve = parse_curve(read_bytes(args.curve))
    print(class_label(curve).value)
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    curve = parse_curve(read_bytes(args.curve))
    _emit(emit_curve(normalize(curve, args.lam)), args.out)
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    curve = parse_curve(read_bytes(args.curve))
    _emit(emit_trace(reduce(curve, canonical=not args.no_canonical, steps=args.steps, tol=args.tol)), args.out)
    return 0


def cmd_homotope(args: argparse.Namespace) -> int:
    a = parse_curve(read_bytes(args.a))
    b = parse_curve(read_bytes(args.b))
    _emit(emit_trace(build_homotopy(a, b, steps=args.steps)), args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = validate(parse_curve(read_bytes(args.curve), check=False))
    _emit(canonical_json(_report_payload(report)), None)
    return 0 if report.valid else 1


def cmd_verify_trace(args: argparse.Namespace) -> int:
    report = verify_trace(parse_trace(read_bytes(args.trace)))
    _emit(canonical_json(_report_payload(report)), None)
    return 0 if report.valid else 1


def cmd_csc(args: argparse.Namespace) -> int:
    sol = solve_csc(args.start, args.end, args.kappa)
    best = sol.best
    oracle = csc_closed_form(args.start, args.end, args.kappa)
    summary = {
        "best": best.word.value,
        "length": best.length,
        "words": {w.word.value: w.length for w in sol.candidates},
        "closed_form": {w.value: length for w, length in oracle.items() if length is not None},
    }
    _emit(canonical_json(summary), None)
    if args.out:
        write_bytes(args.out, emit_curve(sol.curve()))
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    if args.input:
        raw = read_bytes(args.input)
        item: Any = parse_trace(raw) if b'"frames"' in raw else parse_curve(raw, check=False)
    elif args.x is not None and args.y is not None:
        item = build_lens(args.x, args.y, args.kappa)
    else:
        raise DomainError("render needs an input document or --x and --y for a lens")
    write_bytes(args.out, render_svg(item, regions=args.regions, frames=args.frames))
    return 0


def cmd_random(args: argparse.Namespace) -> int:
    curve = random_curve(args.x, args.y, args.kappa, args.budget, args.seed)
    _emit(emit_curve(curve), args.out)
    return 0


def _random_fragment(kappa: KappaParams, rng: Any) -> CsCurve | None:
    start = Config(Point2(0.0, 0.0), float(rng.uniform(-math.pi, math.pi)))
    walk = random_walk(start, kappa, int(rng.integers(1, 4)), rng)
    curve = CsCurve(kappa, tuple(walk))
    cut = min(curve.length, float(rng.uniform(0.05, 0.95)) * kappa.r)
    return subcurve(curve, 0.0, cut) if cut > settings.eps_join else None


def falsify(kappa: KappaParams, d: float, trials: int, seed: int | None) -> dict[str, Any]:
    """Monte-Carlo counts for the forbidden region, union dichotomy, embeddedness and replacement checks."""
    x, y = Point2(0.0, 0.0), Point2(d, 0.0)
    lens = build_lens(x, y, kappa)
    forbidden = assert_no_curve_in_E(lens, trials, seed)
    rng = make_rng(seed)
    union_violations = in_lens = self_crossing = replacement_violations = 0
    for _ in tqdm(range(trials), desc="falsifiers", disable=not settings.progress):
        curve = random_curve(x, y, kappa, int(rng.integers(3, 7)), rng, start_heading=0.0, heading_spread=math.pi / 3)
        if curve_in_union(lens, curve) is UnionMembership.VIOLATION:
            union_violations += 1
        if curve_in_cl_lens(lens, curve):
            in_lens += 1
            if self_intersections(curve):
                self_crossing += 1
        fragment = _random_fragment(kappa, rng)
        if fragment is None:
            continue
        try:
            if replace_fragment(fragment).length > fragment.length + settings.length_tol:
                replacement_violations += 1
        except InfeasibleError:
            replacement_violations += 1
    return {
        "trials": trials,
        "seed": seed,
        "forbidden_region_hits": forbidden.in_e,
        "union_dichotomy_violations": union_violations,
        "curves_in_closed_lens": in_lens,
        "self_intersecting_in_lens": self_crossing,
        "replacement_violations": replacement_violations,
    }


def cmd_falsify(args: argparse.Namespace) -> int:
    summary = falsify(args.kappa, args.d, args.trials, args.seed)
    _emit(canonical_json(summary), None)
    failures = summary["forbidden_region_hits"] + summary["union_dichotomy_violations"]
    failures += summary["self_intersecting_in_lens"] + summary["replacement_violations"]
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_endpoints(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--x", type=point_arg, required=required, default=None, help="Start point 'X,Y'")
    p.add_argument("--y", type=point_arg, required=required, default=None, help="End point 'X,Y'")
    p.add_argument("--kappa", type=kappa_arg, default=KappaParams(1.0), help="Curvature bound (default 1)")


def _add_steps(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--steps", type=positive_int, default=None, help=f"Coarse frames per move (default {settings.default_steps})"
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kcurves",
        description="Curvature-constrained plane curves: classes, CSC paths and homotopy traces.",
    )
    ap.add_argument("--log-level", default=None, help=f"Logging level (default {settings.log_level})")
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command("classify", cmd_classify, "Class count and lens regions for two endpoints")
    _add_endpoints(p)
    p.add_argument("--point", type=point_arg, action="append", help="Point 'X,Y' to classify (repeatable)")

    p = command("label", cmd_label, "Homotopy class label of a curve document")
    p.add_argument("curve")

    p = command("normalize", cmd_normalize, "Replace every fragment of a curve by its CSC replacement")
    p.add_argument("curve")
    p.add_argument("--lam", type=float, default=None, help="Fragment length as a fraction of r")
    p.add_argument("--out", default=None)

    p = command("reduce", cmd_reduce, "Trace from a curve to the minimizer of its class")
    p.add_argument("curve")
    p.add_argument("--no-canonical", action="store_true", help="Stop at the first minimizer reached")
    _add_steps(p)
    p.add_argument("--tol", type=positive_float, default=None, help="Stop this close to the class minimum length")
    p.add_argument("--out", default=None)

    p = command("homotope", cmd_homotope, "Trace between two curves of the same class")
    p.add_argument("a")
    p.add_argument("b")
    _add_steps(p)
    p.add_argument("--out", default=None)

    p = command("verify", cmd_verify, "Validate a curve document")
    p.add_argument("curve")

    p = command("verify-trace", cmd_verify_trace, "Validate a trace document frame by frame")
    p.add_argument("trace")

    p = command("csc", cmd_csc, "Shortest CSC path between two configurations")
    p.add_argument("--start", type=config_arg, required=True, help="Start configuration 'X,Y,THETA'")
    p.add_argument("--end", type=config_arg, required=True, help="End configuration 'X,Y,THETA'")
    p.add_argument("--kappa", type=kappa_arg, default=KappaParams(1.0))
    p.add_argument("--out", default=None, help="Write the shortest path as a curve document")

    p = command("render", cmd_render, "SVG of a curve, a trace or a lens")
    p.add_argument("input", nargs="?", default=None)
    _add_endpoints(p, required=False)
    p.add_argument("--regions", action="store_true", help="Shade the lens and draw C1 and C2")
    p.add_argument("--frames", type=int, default=None, help="Draw at most N frames of a trace")
    p.add_argument("--out", required=True)

    p = command("random", cmd_random, "Random valid curve document")
    _add_endpoints(p)
    p.add_argument("--budget", type=int, default=6, help="Component budget (at least 3)")
    p.add_argument("--seed", type=int, default=settings.random_seed)
    p.add_argument("--out", default=None)

    p = command("falsify", cmd_falsify, "Run the region and replacement falsifiers")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=settings.random_seed)
    p.add_argument("--d", type=float, default=1.0, help="Endpoint distance of the lens")
    p.add_argument("--kappa", type=kappa_arg, default=KappaParams(1.0))
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = (args.log_level or settings.log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except KCurvesError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
