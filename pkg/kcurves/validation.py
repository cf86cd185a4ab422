"""Curvature-bound validation and falsifier checks for the lower-bound results.

The ``check_*`` functions verify instances of known facts about bounded-curvature
curves. They return ``True`` for every conforming input; a ``False`` (or a
``DichotomyResult.VIOLATION``) is a counterexample and therefore a bug in the
caller or in the kernel. Inputs that do not meet the hypotheses raise
``PreconditionError``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import settings
from .errors import FormatError, PreconditionError
from .geometry import (
    ArcComponent,
    Band,
    CsCurve,
    Curve,
    Point2,
    SampledCurve,
    curve_points,
)
from .utils import circumradius_curvature


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    location: float  # arc length
    kind: str  # "curvature" | "joint" | "endpoint" | "class" | "continuity" | "kappa"
    magnitude: float
    frame: int | None = None

    def __str__(self) -> str:
        where = f"frame {self.frame}, " if self.frame is not None else ""
        return f"{self.kind} at {where}s={self.location:.6g} (magnitude {self.magnitude:.3e})"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    max_curvature: float
    worst_joint_gap: float
    violations: list[Violation] = field(default_factory=list)

    @classmethod
    def from_violations(cls, max_curvature: float, worst_joint_gap: float, violations: list[Violation]) -> "ValidationReport":
        return cls(not violations, max_curvature, worst_joint_gap, violations)


@dataclass(frozen=True)
class Disk:
    center: Point2
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise PreconditionError(f"disk radius must be positive, got {self.radius}")


class DichotomyResult(str, Enum):
    ON_BOUNDARY = "OnBoundary"
    INTERIOR_DISJOINT = "InteriorDisjoint"
    VIOLATION = "Violation"


def validate_cs(curve: CsCurve) -> ValidationReport:
    r = curve.kappa.r
    violations: list[Violation] = []
    max_k = 0.0
    worst_gap = 0.0
    for off, comp in zip(curve.offsets, curve.components):
        if isinstance(comp, ArcComponent):
            k = 1.0 / comp.radius
            max_k = max(max_k, k)
            if comp.radius < r * (1.0 - settings.eps_rel):
                violations.append(Violation(off, "curvature", k))
    for i in range(1, len(curve.components)):
        prev, nxt = curve.components[i - 1], curve.components[i]
        pos_gap = prev.end.distance(nxt.start)
        head_gap = abs(math.remainder(prev.heading_at(prev.length) - nxt.heading_at(0.0), 2 * math.pi))
        gap = max(pos_gap, head_gap)
        worst_gap = max(worst_gap, gap)
        if gap > settings.eps_join:
            violations.append(Violation(curve.offsets[i], "joint", gap))
    return ValidationReport.from_violations(max_k, worst_gap, violations)


def validate_sampled(curve: SampledCurve) -> ValidationReport:
    if len(curve.points) < 3:
        raise FormatError(f"a sampled curve needs at least 3 points, got {len(curve.points)}")
    pts = curve.array()
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    dup = np.flatnonzero(steps <= settings.eps_degenerate)
    if dup.size:
        raise FormatError(f"duplicate consecutive sample points at index {int(dup[0]) + 1}", field="points")
    k = circumradius_curvature(pts)
    limit = curve.kappa.kappa * (1.0 + settings.eps_rel)
    cum = np.asarray(curve.cumulative_lengths)
    violations = [Violation(float(cum[i + 1]), "curvature", float(k[i])) for i in np.flatnonzero(k > limit)]
    return ValidationReport.from_violations(float(k.max()) if k.size else 0.0, 0.0, violations)


def validate(curve: Curve) -> ValidationReport:
    if isinstance(curve, SampledCurve):
        return validate_sampled(curve)
    return validate_cs(curve)


def _polar_winding(pts: np.ndarray) -> float:
    ang = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    return float(abs(ang[-1] - ang[0]))


def check_radial_bound(curve: Curve, eta: float, center: Point2 = Point2(0.0, 0.0)) -> bool:
    """Length is at least r * eta for a curve outside the radius-r circle winding through eta.

    ``eta`` is the total accumulated polar angle about ``center``.
    """
    r = curve.kappa.r
    if eta < 0:
        raise PreconditionError(f"winding angle must be nonnegative, got {eta}")
    _, pts = curve_points(curve)
    rel = pts - np.asarray(center, dtype=float)
    radii = np.hypot(rel[:, 0], rel[:, 1])
    tol = 1e-6 * r
    if abs(radii[0] - r) > tol:
        raise PreconditionError(f"curve must start at distance r={r} from the center, got {radii[0]}")
    if radii.min() < r - tol:
        raise PreconditionError(f"curve enters the radius-r disk (min radius {radii.min():.6g})")
    if _polar_winding(rel) < eta - 1e-6:
        raise PreconditionError(f"curve winds through less than eta={eta}")
    return curve.length >= r * eta - settings.length_tol


def check_vertical_bound(curve: Curve, origin: Point2 = Point2(0.0, 0.0)) -> bool:
    start, end = curve.start_point, curve.end_point
    if start.distance(origin) > settings.eps_join:
        raise PreconditionError(f"curve must start at {tuple(origin)}, starts at {tuple(start)}")
    z = end.y - origin.y
    if z < 0:
        raise PreconditionError(f"end height must be nonnegative, got {z}")
    return curve.length >= z - settings.length_tol


def check_disk_dichotomy(curve: Curve, disk: Disk) -> DichotomyResult:
    """Classify a curve lying in a closed disk as on its boundary or interior-disjoint from it."""
    tol = max(settings.eps_region, 1e-9 * disk.radius)
    s, pts = curve_points(curve)
    dist = np.hypot(pts[:, 0] - disk.center.x, pts[:, 1] - disk.center.y)
    if dist.max() > disk.radius + tol:
        raise PreconditionError(f"curve leaves the disk (max distance {dist.max():.6g})")
    on_boundary = np.abs(dist - disk.radius) <= tol
    if on_boundary.all():
        return DichotomyResult.ON_BOUNDARY
    interior = (s > settings.eps_join) & (s < curve.length - settings.eps_join)
    if np.any(on_boundary & interior):
        logger.warning(f"disk dichotomy violated at s={float(s[np.argmax(on_boundary & interior)]):.6g}")
        return DichotomyResult.VIOLATION
    return DichotomyResult.INTERIOR_DISJOINT


def check_band_escape(curve: Curve, circle: Disk, band: Band | None = None) -> bool:
    """True iff no point of a curve confined to the band lies above the circle.

    In band coordinates the band is ``-r < x < r, y >= 0``, the circle is
    centred on the negative y-axis and both curve endpoints lie on the x-axis
    and on the circle.
    """
    r = curve.kappa.r
    band = band or Band(Point2(0.0, 0.0), (0.0, 1.0), r)
    tol = 1e-9 * max(r, 1.0)
    if abs(circle.radius - r) > tol or abs(band.half_width - r) > tol:
        raise PreconditionError("band half width and circle radius must both equal r")
    cc = band.coordinates(np.asarray([circle.center], dtype=float))[0]
    if abs(cc[0]) > tol or cc[1] >= 0:
        raise PreconditionError("circle center must lie on the negative band axis")
    _, pts = curve_points(curve)
    bc = band.coordinates(pts)
    if np.any(np.abs(bc[:, 0]) >= r) or np.any(bc[:, 1] < -tol):
        raise PreconditionError("curve is not contained in the band")
    for end in (bc[0], bc[-1]):
        if abs(end[1]) > 1e-7 or abs(math.hypot(end[0] - cc[0], end[1] - cc[1]) - r) > 1e-7:
            raise PreconditionError("curve endpoints must lie on the x-axis and on the circle")
    dist = np.hypot(bc[:, 0] - cc[0], bc[:, 1] - cc[1])
    return not bool(np.any(dist > r + 1e-7))
