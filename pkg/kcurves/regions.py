"""Lens regions between two points and the homotopy classification of Sigma(x, y).

For 0 < d < 2r the two radius-r circles through x and y (C1 centred on the
left of the ray x -> y, C2 on the right) bound the lens I = int(D1 n D2). A
curve of Sigma(x, y) is either contained in cl(I) or it is not, and those are
the only two homotopy classes. Closed curves form one class, and so does
every curve once d >= 2r.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from tqdm import tqdm

from .config import settings
from .errors import CurveValidationError, DomainError
from .geometry import (
    ArcComponent,
    CsCurve,
    Curve,
    KappaParams,
    Point2,
    SegmentComponent,
    curve_points,
    evaluate,
)
from .generator import make_rng, random_curve
from .utils import TWO_PI, normalize_angle
from .validation import validate


logger = logging.getLogger(__name__)


class RegionTag(str, Enum):
    INTERIOR_LENS = "InteriorLens"
    LENS_BOUNDARY = "LensBoundary"
    INTERIOR_E = "InteriorE"
    OUTER_BOUNDARY = "OuterBoundary"
    OUTSIDE_U = "OutsideU"


class ClassLabel(str, Enum):
    CLOSED = "Closed"
    IN_LENS = "InLens"
    NOT_IN_LENS = "NotInLens"
    UNRESTRICTED = "Unrestricted"


class UnionMembership(str, Enum):
    IN_CLOSED_LENS = "InClosedLens"
    ON_CIRCLE = "OnCircle"
    OUTSIDE = "Outside"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class LensGeometry:
    x: Point2
    y: Point2
    kappa: KappaParams
    d: float
    c1: Point2
    c2: Point2

    @property
    def r(self) -> float:
        return self.kappa.r

    @property
    def centers(self) -> tuple[Point2, Point2]:
        return self.c1, self.c2

    def signed_distances(self, pts: np.ndarray) -> np.ndarray:
        """(n, 2) array of |p - c_i| - r for both circles."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty((len(pts), 2))
        for i, c in enumerate(self.centers):
            out[:, i] = np.hypot(pts[:, 0] - c.x, pts[:, 1] - c.y) - self.r
        return out

    def _arc(self, which: int, longer: bool) -> ArcComponent:
        c = self.centers[which - 1]
        a_x = math.atan2(self.x.y - c.y, self.x.x - c.x)
        a_y = math.atan2(self.y.y - c.y, self.y.x - c.x)
        sweep = normalize_angle(a_y - a_x)
        if longer:
            sweep -= math.copysign(TWO_PI, sweep)
        return ArcComponent(c, self.r, a_x, sweep)

    def shorter_arc(self, which: int = 1) -> CsCurve:
        """The arc of C_which bounding the lens."""
        return CsCurve(self.kappa, (self._arc(which, False),))

    def longer_arc(self, which: int = 1) -> CsCurve:
        return CsCurve(self.kappa, (self._arc(which, True),))

    def lobe_point(self, which: int = 1) -> Point2:
        """A point well inside the lobe of E that belongs to D_which."""
        c, other = (self.c1, self.c2) if which == 1 else (self.c2, self.c1)
        h = c.distance(other)
        ux, uy = (c.x - other.x) / h, (c.y - other.y) / h
        step = self.r - h / 2.0
        return Point2(c.x + step * ux, c.y + step * uy)


def build_lens(x: Point2, y: Point2, kappa: KappaParams) -> LensGeometry:
    x, y = Point2(*x), Point2(*y)
    r = kappa.r
    d = x.distance(y)
    if d <= settings.eps_degenerate:
        raise DomainError("x = y: closed curves form a single class and have no lens")
    if d >= 2.0 * r:
        raise DomainError(f"d = {d:.6g} >= 2r = {2 * r:.6g}: every curve is in one class and there is no lens")
    mx, my = (x.x + y.x) / 2.0, (x.y + y.y) / 2.0
    h = math.sqrt(r * r - d * d / 4.0)
    nx, ny = -(y.y - x.y) / d, (y.x - x.x) / d
    return LensGeometry(x, y, kappa, d, Point2(mx + h * nx, my + h * ny), Point2(mx - h * nx, my - h * ny))


def _tag(d1: float, d2: float, eps: float) -> RegionTag:
    hi, lo = max(d1, d2), min(d1, d2)
    if hi < -eps:
        return RegionTag.INTERIOR_LENS
    if hi <= eps:
        return RegionTag.LENS_BOUNDARY
    if lo < -eps:
        return RegionTag.INTERIOR_E
    if lo <= eps:
        return RegionTag.OUTER_BOUNDARY
    return RegionTag.OUTSIDE_U


def classify_point(lens: LensGeometry, p: Point2) -> RegionTag:
    d1, d2 = lens.signed_distances([p])[0]
    return _tag(float(d1), float(d2), settings.eps_region)


def classify_points(lens: LensGeometry, pts: np.ndarray) -> list[RegionTag]:
    return [_tag(float(a), float(b), settings.eps_region) for a, b in lens.signed_distances(pts)]


def _check_endpoints(lens: LensGeometry, curve: Curve) -> None:
    tol = settings.eps_join * max(1.0, lens.r)
    if curve.start_point.distance(lens.x) > tol or curve.end_point.distance(lens.y) > tol:
        raise DomainError(
            f"curve runs from {tuple(curve.start_point)} to {tuple(curve.end_point)}, "
            f"lens endpoints are {tuple(lens.x)} and {tuple(lens.y)}"
        )


def _component_extremes(comp: ArcComponent | SegmentComponent, c: Point2) -> list[tuple[float, float]]:
    """(u, |p(u) - c|) at the component endpoints and the farthest interior point from ``c``."""
    out = [(0.0, comp.start.distance(c)), (comp.length, comp.end.distance(c))]
    if isinstance(comp, ArcComponent):
        off = comp.center.distance(c)
        if off <= settings.eps_degenerate:
            out.append((comp.length / 2.0, comp.radius))
            return out
        away = math.atan2(comp.center.y - c.y, comp.center.x - c.x)
        for u in comp.locate(
            (comp.center.x + comp.radius * math.cos(away), comp.center.y + comp.radius * math.sin(away)), 1e-9
        ):
            out.append((u, off + comp.radius))
    return out


def max_excess(lens: LensGeometry, curve: Curve) -> float:
    """Largest signed distance outside cl(I) reached by ``curve``.

    Exact for cs curves: distance to a point is convex along a segment and
    peaks on an arc in the direction away from the point.
    """
    if isinstance(curve, CsCurve):
        worst = -math.inf
        for comp in curve.components:
            for c in lens.centers:
                worst = max(worst, max(dist for _, dist in _component_extremes(comp, c)) - lens.r)
        return worst
    _, pts = curve_points(curve)
    return float(lens.signed_distances(pts).max())


def curve_in_cl_lens(lens: LensGeometry, curve: Curve) -> bool:
    _check_endpoints(lens, curve)
    return max_excess(lens, curve) <= settings.eps_region


def boundary_contacts(lens: LensGeometry, curve: Curve) -> list[float]:
    """Interior arc-length parameters where a curve in cl(I) touches the lens boundary."""
    eps = settings.eps_region
    L = curve.length
    found: list[float] = []
    if isinstance(curve, CsCurve):
        for off, comp in zip(curve.offsets, curve.components):
            for c in lens.centers:
                for u, dist in _component_extremes(comp, c):
                    if abs(dist - lens.r) <= eps:
                        found.append(off + u)
    else:
        s, pts = curve_points(curve)
        hit = np.abs(lens.signed_distances(pts).max(axis=1)) <= eps
        found = [float(v) for v in s[hit]]
    interior = sorted(s for s in found if settings.eps_join < s < L - settings.eps_join)
    out: list[float] = []
    for s in interior:
        if not out or s - out[-1] > 1e-9:
            out.append(s)
    return out


def is_boundary_arc(lens: LensGeometry, curve: Curve) -> bool:
    """True iff the curve traces one of the two shorter arcs of C1 or C2."""
    _check_endpoints(lens, curve)
    if max_excess(lens, curve) > settings.eps_region:
        return False
    _, pts = curve_points(curve)
    dist = np.abs(lens.signed_distances(pts))
    tol = max(settings.eps_region, 1e-9 * lens.r)
    return bool(np.all(dist[:, 0] <= tol) or np.all(dist[:, 1] <= tol))


def curve_in_union(lens: LensGeometry, curve: Curve) -> UnionMembership:
    """Where a curve of Sigma(x, y) sits relative to D1 u D2.

    A curve inside the union is either in cl(I) or runs along C1 or C2;
    ``VIOLATION`` reports a curve that is neither.
    """
    _check_endpoints(lens, curve)
    if max_excess(lens, curve) <= settings.eps_region:
        return UnionMembership.IN_CLOSED_LENS
    _, pts = curve_points(curve)
    dist = lens.signed_distances(pts)
    tol = max(settings.eps_region, 1e-9 * lens.r)
    if np.any(dist.min(axis=1) > tol):
        return UnionMembership.OUTSIDE
    if np.all(np.abs(dist[:, 0]) <= tol) or np.all(np.abs(dist[:, 1]) <= tol):
        return UnionMembership.ON_CIRCLE
    logger.warning("curve lies in D1 u D2 without being in cl(I) or on a circle")
    return UnionMembership.VIOLATION


def check_union_dichotomy(lens: LensGeometry, curve: Curve) -> bool:
    return curve_in_union(lens, curve) is not UnionMembership.VIOLATION


def _regime(x: Point2, y: Point2, kappa: KappaParams) -> tuple[float, str]:
    d = Point2(*x).distance(y)
    r = kappa.r
    if d <= settings.eps_join * max(1.0, r):
        return d, "closed"
    if d >= 2.0 * r * (1.0 - 1e-12):
        return d, "unrestricted"
    return d, "lens"


def class_count(x: Point2, y: Point2, kappa: KappaParams) -> int:
    return 2 if _regime(x, y, kappa)[1] == "lens" else 1


def labels_for(x: Point2, y: Point2, kappa: KappaParams) -> tuple[ClassLabel, ...]:
    """Labels available to curves joining ``x`` and ``y``."""
    regime = _regime(x, y, kappa)[1]
    if regime == "closed":
        return (ClassLabel.CLOSED,)
    if regime == "unrestricted":
        return (ClassLabel.UNRESTRICTED,)
    return (ClassLabel.IN_LENS, ClassLabel.NOT_IN_LENS)


def class_label(curve: Curve) -> ClassLabel:
    report = validate(curve)
    if not report.valid:
        raise CurveValidationError(f"curve is not kappa-constrained: {report.violations[0]}", report)
    x, y = curve.start_point, curve.end_point
    regime = _regime(x, y, curve.kappa)[1]
    if regime == "closed":
        return ClassLabel.CLOSED
    if regime == "unrestricted":
        return ClassLabel.UNRESTRICTED
    lens = build_lens(x, y, curve.kappa)
    return ClassLabel.IN_LENS if curve_in_cl_lens(lens, curve) else ClassLabel.NOT_IN_LENS


def _same_endpoints(a: Curve, b: Curve) -> None:
    if a.kappa != b.kappa:
        raise DomainError(f"curves have different kappa ({a.kappa.kappa} vs {b.kappa.kappa})")
    tol = settings.eps_join * max(1.0, a.kappa.r)
    if a.start_point.distance(b.start_point) > tol or a.end_point.distance(b.end_point) > tol:
        raise DomainError("curves do not share their endpoints")


def are_homotopic(a: Curve, b: Curve) -> bool:
    _same_endpoints(a, b)
    return class_label(a) == class_label(b)


def class_minimum_length(x: Point2, y: Point2, kappa: KappaParams, label: ClassLabel) -> float:
    if label not in labels_for(x, y, kappa):
        raise DomainError(f"label {label.value} is inconsistent with d = {Point2(*x).distance(y):.6g}")
    r = kappa.r
    d = Point2(*x).distance(y)
    if label is ClassLabel.CLOSED:
        return TWO_PI * r
    if label is ClassLabel.NOT_IN_LENS:
        return r * (TWO_PI - 2.0 * math.asin(d / (2.0 * r)))
    return d


@dataclass(frozen=True)
class ForbiddenRegionReport:
    trials: int
    in_e: int
    seed: int | None

    @property
    def holds(self) -> bool:
        return self.in_e == 0


def _interior_in_e(lens: LensGeometry, curve: CsCurve) -> bool:
    s, pts = curve_points(curve)
    inner = (s > settings.eps_join) & (s < curve.length - settings.eps_join)
    inner_pts = pts[inner] if inner.any() else np.asarray([evaluate(curve, curve.length / 2.0)])
    dist = lens.signed_distances(inner_pts)
    eps = settings.eps_region
    return bool(np.all((dist.max(axis=1) > eps) & (dist.min(axis=1) < -eps)))


def assert_no_curve_in_E(lens: LensGeometry, trials: int, seed: int | None = None, budget: int = 4) -> ForbiddenRegionReport:
    """Search for a curve of Sigma(x, y) whose interior lies in E.

    Curves leave x and reach y aimed at one of the two lobes of E so that the
    search concentrates where a counterexample would have to live.
    """
    rng = make_rng(seed)
    found = 0
    for i in tqdm(range(trials), desc="forbidden region", disable=not settings.progress):
        lobe = lens.lobe_point(1 if rng.random() < 0.5 else 2)
        out_dir = math.atan2(lobe.y - lens.x.y, lobe.x - lens.x.x)
        in_dir = math.atan2(lens.y.y - lobe.y, lens.y.x - lobe.x)
        curve = random_curve(
            lens.x,
            lens.y,
            lens.kappa,
            budget,
            rng,
            start_heading=out_dir,
            end_heading=in_dir,
            heading_spread=math.pi / 4,
        )
        if _interior_in_e(lens, curve):
            found += 1
            logger.warning(f"trial {i}: curve interior lies in E (length {curve.length:.9g})")
    logger.info(f"forbidden region search: {found} of {trials} curves in E")
    return ForbiddenRegionReport(trials, found, seed)
