"""Planar kernel for piecewise constant-curvature curves.

Curves are either exact ``CsCurve`` values (radius-r arcs and line segments)
or ``SampledCurve`` polylines used to ingest general bounded-curvature curves.
All values are immutable; every operation is a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from .config import settings
from .errors import DomainError, JointError
from .utils import (
    TWO_PI,
    angle_gap,
    cross,
    dedupe_pairs,
    mod2pi,
    normalize_angle,
)


@dataclass(frozen=True)
class KappaParams:
    kappa: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise DomainError(f"kappa must be positive and finite, got {self.kappa}")

    @property
    def r(self) -> float:
        return 1.0 / self.kappa

    @classmethod
    def from_radius(cls, r: float) -> "KappaParams":
        if not (math.isfinite(r) and r > 0):
            raise DomainError(f"radius must be positive and finite, got {r}")
        return cls(1.0 / r)


class Point2(NamedTuple):
    x: float
    y: float

    def distance(self, other: Sequence[float]) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])

    def offset(self, dx: float, dy: float) -> "Point2":
        return Point2(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class Config:
    position: Point2
    heading: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", Point2(float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "heading", normalize_angle(float(self.heading)))

    def gap(self, other: "Config") -> float:
        """Largest of position distance and heading difference."""
        return max(self.position.distance(other.position), angle_gap(self.heading, other.heading))

    def __str__(self) -> str:
        return f"(({self.position.x:.6g}, {self.position.y:.6g}), {self.heading:.6g})"


@dataclass(frozen=True)
class ArcComponent:
    center: Point2
    radius: float
    start_angle: float
    sweep: float

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (*self.center, self.radius, self.start_angle, self.sweep))):
            raise DomainError(f"arc with non-finite data: center {self.center}, radius {self.radius}, sweep {self.sweep}")

    @property
    def side(self) -> int:
        # +1 counterclockwise (left turn), -1 clockwise (right turn)
        return 1 if self.sweep > 0 else -1

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    @property
    def curvature(self) -> float:
        return self.side / self.radius

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    def angle_at(self, u: float) -> float:
        return self.start_angle + self.side * u / self.radius

    def point_at(self, u: float) -> Point2:
        a = self.angle_at(u)
        return Point2(self.center.x + self.radius * math.cos(a), self.center.y + self.radius * math.sin(a))

    def heading_at(self, u: float) -> float:
        return self.angle_at(u) + self.side * math.pi / 2.0

    def points(self, us: np.ndarray) -> np.ndarray:
        a = self.start_angle + self.side * us / self.radius
        return np.column_stack((self.center.x + self.radius * np.cos(a), self.center.y + self.radius * np.sin(a)))

    @property
    def start(self) -> Point2:
        return self.point_at(0.0)

    @property
    def end(self) -> Point2:
        return Point2(
            self.center.x + self.radius * math.cos(self.end_angle),
            self.center.y + self.radius * math.sin(self.end_angle),
        )

    def reversed(self) -> "ArcComponent":
        return ArcComponent(self.center, self.radius, self.end_angle, -self.sweep)

    def trimmed(self, u0: float, u1: float) -> "ArcComponent":
        return ArcComponent(self.center, self.radius, self.angle_at(u0), self.side * (u1 - u0) / self.radius)

    def locate(self, p: Sequence[float], tol: float) -> list[float]:
        """Arc-length parameters in [0, length] at which the arc passes through ``p``."""
        if abs(math.hypot(p[0] - self.center.x, p[1] - self.center.y) - self.radius) > tol:
            return []
        ang = math.atan2(p[1] - self.center.y, p[0] - self.center.x)
        base = mod2pi(self.side * (ang - self.start_angle)) * self.radius
        full = TWO_PI * self.radius
        out = []
        for u in (base - full, base, base + full):
            if -tol <= u <= self.length + tol:
                out.append(min(max(u, 0.0), self.length))
        return out


@dataclass(frozen=True)
class SegmentComponent:
    start: Point2
    end: Point2

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (*self.start, *self.end))):
            raise DomainError(f"segment with non-finite endpoints {self.start} -> {self.end}")

    @property
    def length(self) -> float:
        return self.start.distance(self.end)

    @property
    def heading(self) -> float:
        return math.atan2(self.end.y - self.start.y, self.end.x - self.start.x)

    curvature = 0.0

    def point_at(self, u: float) -> Point2:
        L = self.length
        t = u / L if L > 0 else 0.0
        return Point2(self.start.x + t * (self.end.x - self.start.x), self.start.y + t * (self.end.y - self.start.y))

    def heading_at(self, u: float) -> float:
        return self.heading

    def points(self, us: np.ndarray) -> np.ndarray:
        L = self.length
        t = us / L if L > 0 else np.zeros_like(us)
        return np.column_stack(
            (self.start.x + t * (self.end.x - self.start.x), self.start.y + t * (self.end.y - self.start.y))
        )

    def reversed(self) -> "SegmentComponent":
        return SegmentComponent(self.end, self.start)

    def trimmed(self, u0: float, u1: float) -> "SegmentComponent":
        return SegmentComponent(self.point_at(u0), self.point_at(u1))

    def locate(self, p: Sequence[float], tol: float) -> list[float]:
        L = self.length
        dx, dy = self.end.x - self.start.x, self.end.y - self.start.y
        px, py = p[0] - self.start.x, p[1] - self.start.y
        if abs(cross(dx, dy, px, py)) / L > tol:
            return []
        u = (px * dx + py * dy) / L
        if -tol <= u <= L + tol:
            return [min(max(u, 0.0), L)]
        return []


Component = Union[ArcComponent, SegmentComponent]


def _component_start_heading(c: Component) -> float:
    return c.heading_at(0.0)


def _component_end_heading(c: Component) -> float:
    return c.heading_at(c.length)


@dataclass(frozen=True)
class CsCurve:
    """Concatenation of radius-r arcs and line segments.

    Joint continuity is not enforced here; ``validate_cs`` reports it and
    ``concatenate`` refuses mismatched joints. Components shorter than
    ``settings.eps_degenerate`` are dropped.
    """

    kappa: KappaParams
    components: tuple[Component, ...]
    offsets: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        kept = tuple(c for c in self.components if c.length >= settings.eps_degenerate)
        if not kept:
            raise DomainError("a cs curve needs at least one non-degenerate component")
        object.__setattr__(self, "components", kept)
        offs = [0.0]
        for c in kept:
            offs.append(offs[-1] + c.length)
        object.__setattr__(self, "offsets", tuple(offs))

    @property
    def length(self) -> float:
        return self.offsets[-1]

    @property
    def complexity(self) -> int:
        return len(self.components)

    @property
    def start_point(self) -> Point2:
        return self.components[0].start

    @property
    def end_point(self) -> Point2:
        return self.components[-1].end

    @property
    def start_config(self) -> Config:
        return Config(self.start_point, _component_start_heading(self.components[0]))

    @property
    def end_config(self) -> Config:
        return Config(self.end_point, _component_end_heading(self.components[-1]))

    def locate(self, s: float) -> tuple[int, float]:
        if s < -settings.eps_join or s > self.length + settings.eps_join:
            raise DomainError(f"arc length {s} outside [0, {self.length}]")
        s = min(max(s, 0.0), self.length)
        idx = int(np.searchsorted(self.offsets, s, side="right")) - 1
        idx = min(max(idx, 0), len(self.components) - 1)
        return idx, min(s - self.offsets[idx], self.components[idx].length)


@dataclass(frozen=True)
class SampledCurve:
    kappa: KappaParams
    points: tuple[Point2, ...]
    cumulative_lengths: tuple[float, ...]

    @classmethod
    def from_points(cls, kappa: KappaParams, points: Sequence[Sequence[float]]) -> "SampledCurve":
        pts = tuple(Point2(float(p[0]), float(p[1])) for p in points)
        if not all(math.isfinite(v) for p in pts for v in p):
            raise DomainError("sampled curve with non-finite coordinates")
        arr = np.asarray(pts, dtype=float)
        steps = np.linalg.norm(np.diff(arr, axis=0), axis=1) if len(pts) > 1 else np.zeros(0)
        cum = np.concatenate(([0.0], np.cumsum(steps)))
        return cls(kappa, pts, tuple(float(v) for v in cum))

    @property
    def length(self) -> float:
        return self.cumulative_lengths[-1]

    @property
    def start_point(self) -> Point2:
        return self.points[0]

    @property
    def end_point(self) -> Point2:
        return self.points[-1]

    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def headings(self) -> np.ndarray:
        """Unwrapped discrete tangent headings at every vertex.

        Each vertex blends the directions of its two chords, weighted by the
        opposite chord length; the ends extrapolate the first and last turn.
        Both are exact for points on a circle or a line, whatever the spacing.
        """
        pts = self.array()
        chords = np.diff(pts, axis=0)
        if len(chords) == 0:
            return np.zeros(len(pts))
        lengths = np.linalg.norm(chords, axis=1)
        dirs = np.unwrap(np.arctan2(chords[:, 1], chords[:, 0]))
        out = np.empty(len(pts))
        if len(dirs) == 1:
            out[:] = dirs[0]
            return out
        turn = np.diff(dirs)
        pair = lengths[:-1] + lengths[1:]
        w = np.divide(lengths[:-1], pair, out=np.full(len(turn), 0.5), where=pair > 0)
        out[1:-1] = dirs[:-1] + w * turn
        out[0] = dirs[0] - w[0] * turn[0]
        out[-1] = dirs[-1] + (1.0 - w[-1]) * turn[-1]
        return out

    @property
    def start_config(self) -> Config:
        return Config(self.start_point, float(self.headings()[0]))

    @property
    def end_config(self) -> Config:
        return Config(self.end_point, float(self.headings()[-1]))


Curve = Union[CsCurve, SampledCurve]


@dataclass(frozen=True)
class Band:
    axis_origin: Point2
    axis_direction: tuple[float, float]
    half_width: float

    def __post_init__(self) -> None:
        n = math.hypot(*self.axis_direction)
        if n == 0 or self.half_width <= 0:
            raise DomainError("band needs a nonzero axis direction and positive half width")
        object.__setattr__(self, "axis_direction", (self.axis_direction[0] / n, self.axis_direction[1] / n))

    def coordinates(self, pts: np.ndarray) -> np.ndarray:
        """Band coordinates (lateral, along-axis) of an (n, 2) point array."""
        ux, uy = self.axis_direction
        rel = pts - np.asarray(self.axis_origin, dtype=float)
        lateral = rel[:, 0] * uy - rel[:, 1] * ux
        along = rel[:, 0] * ux + rel[:, 1] * uy
        return np.column_stack((lateral, along))

    def contains(self, pts: np.ndarray, tol: float = 0.0) -> bool:
        bc = self.coordinates(pts)
        return bool(np.all(np.abs(bc[:, 0]) <= self.half_width + tol))


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def arc_from(config: Config, side: int, sweep_abs: float, radius: float) -> ArcComponent:
    """Arc leaving ``config`` turning to ``side`` (+1 left, -1 right)."""
    th = config.heading
    cx = config.position.x - side * radius * math.sin(th)
    cy = config.position.y + side * radius * math.cos(th)
    return ArcComponent(Point2(cx, cy), radius, th - side * math.pi / 2.0, side * sweep_abs)


def segment_from(config: Config, length: float) -> SegmentComponent:
    p = config.position
    return SegmentComponent(p, p.offset(length * math.cos(config.heading), length * math.sin(config.heading)))


def end_of(component: Component) -> Config:
    return Config(component.end, _component_end_heading(component))


def circle_through(point: Point2, heading: float, kappa: KappaParams, side: int = 1) -> CsCurve:
    """Full radius-r circle starting and ending at ``point`` with the given heading."""
    return CsCurve(kappa, (arc_from(Config(point, heading), side, TWO_PI, kappa.r),))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _interp_sampled(curve: SampledCurve, s: float) -> Point2:
    if s < -settings.eps_join or s > curve.length + settings.eps_join:
        raise DomainError(f"arc length {s} outside [0, {curve.length}]")
    arr = curve.array()
    cum = np.asarray(curve.cumulative_lengths)
    return Point2(float(np.interp(s, cum, arr[:, 0])), float(np.interp(s, cum, arr[:, 1])))


def evaluate(curve: Curve, s: float) -> Point2:
    if isinstance(curve, SampledCurve):
        return _interp_sampled(curve, s)
    idx, u = curve.locate(s)
    comp = curve.components[idx]
    if u >= comp.length:
        return comp.end
    return comp.point_at(u)


def tangent(curve: Curve, s: float) -> float:
    """Heading of the unit tangent at arc length ``s``, normalized to (-pi, pi]."""
    if isinstance(curve, SampledCurve):
        _interp_sampled(curve, s)
        h = curve.headings()
        return normalize_angle(float(np.interp(s, np.asarray(curve.cumulative_lengths), h)))
    idx, u = curve.locate(s)
    return normalize_angle(curve.components[idx].heading_at(u))


def config_at(curve: Curve, s: float) -> Config:
    return Config(evaluate(curve, s), tangent(curve, s))


def total_length(curve: Curve) -> float:
    return curve.length


def concatenate(a: CsCurve, b: CsCurve) -> CsCurve:
    if a.kappa != b.kappa:
        raise DomainError(f"cannot join curves with different kappa ({a.kappa.kappa} vs {b.kappa.kappa})")
    ea, sb = a.end_config, b.start_config
    gap = ea.gap(sb)
    if gap > settings.eps_join:
        raise JointError(ea, sb, gap)
    return CsCurve(a.kappa, a.components + b.components)


def concatenate_all(parts: Sequence[CsCurve]) -> CsCurve:
    out = parts[0]
    for p in parts[1:]:
        out = concatenate(out, p)
    return out


def reverse(curve: CsCurve) -> CsCurve:
    return CsCurve(curve.kappa, tuple(c.reversed() for c in reversed(curve.components)))


def subcurve(curve: CsCurve, s0: float, s1: float) -> CsCurve:
    """Restriction of ``curve`` to the arc-length window [s0, s1]."""
    if s1 <= s0:
        raise DomainError(f"empty window [{s0}, {s1}]")
    i0, u0 = curve.locate(s0)
    i1, u1 = curve.locate(s1)
    if u1 == 0.0 and i1 > i0:
        i1 -= 1
        u1 = curve.components[i1].length
    if i0 == i1:
        return CsCurve(curve.kappa, (curve.components[i0].trimmed(u0, u1),))
    first = curve.components[i0]
    last = curve.components[i1]
    middle = curve.components[i0 + 1 : i1]
    return CsCurve(curve.kappa, (first.trimmed(u0, first.length), *middle, last.trimmed(0.0, u1)))


def merge_components(curve: CsCurve, tol: float = 1e-9) -> CsCurve:
    """Fuse consecutive cocircular same-orientation arcs and collinear segments."""
    merged: list[Component] = []
    for comp in curve.components:
        prev = merged[-1] if merged else None
        if isinstance(prev, ArcComponent) and isinstance(comp, ArcComponent):
            if (
                prev.side == comp.side
                and prev.center.distance(comp.center) <= tol
                and abs(prev.radius - comp.radius) <= tol
                and angle_gap(prev.end_angle, comp.start_angle) <= tol
                and abs(prev.sweep + comp.sweep) <= TWO_PI + tol
            ):
                merged[-1] = ArcComponent(prev.center, prev.radius, prev.start_angle, prev.sweep + comp.sweep)
                continue
        if isinstance(prev, SegmentComponent) and isinstance(comp, SegmentComponent):
            if angle_gap(prev.heading, comp.heading) <= tol and prev.end.distance(comp.start) <= tol:
                merged[-1] = SegmentComponent(prev.start, comp.end)
                continue
        merged.append(comp)
    return CsCurve(curve.kappa, tuple(merged))


def reflect(curve: CsCurve, origin: Sequence[float], direction: Sequence[float]) -> CsCurve:
    """Mirror image of ``curve`` across the line through ``origin`` along ``direction``."""
    alpha = math.atan2(direction[1], direction[0])
    c2, s2 = math.cos(2 * alpha), math.sin(2 * alpha)
    ox, oy = origin[0], origin[1]

    def mirror(p: Point2) -> Point2:
        dx, dy = p.x - ox, p.y - oy
        return Point2(ox + c2 * dx + s2 * dy, oy + s2 * dx - c2 * dy)

    comps: list[Component] = []
    for c in curve.components:
        if isinstance(c, ArcComponent):
            comps.append(ArcComponent(mirror(c.center), c.radius, 2 * alpha - c.start_angle, -c.sweep))
        else:
            comps.append(SegmentComponent(mirror(c.start), mirror(c.end)))
    return CsCurve(curve.kappa, tuple(comps))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample(curve: CsCurve, spacing: float) -> SampledCurve:
    if spacing <= 0:
        raise DomainError(f"spacing must be positive, got {spacing}")
    pts: list[Point2] = [curve.start_point]
    for comp in curve.components:
        n = max(1, math.ceil(comp.length / spacing - 1e-12))
        if n > 1:
            us = comp.length * np.arange(1, n) / n
            pts.extend(Point2(float(x), float(y)) for x, y in comp.points(us))
        pts.append(comp.end)
    return SampledCurve.from_points(curve.kappa, pts)


def curve_points(curve: Curve, spacing: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Arc-length parameters and an (n, 2) array of points along ``curve``."""
    if isinstance(curve, SampledCurve):
        return np.asarray(curve.cumulative_lengths), curve.array()
    spacing = spacing or settings.sample_spacing * curve.kappa.r
    params: list[np.ndarray] = []
    chunks: list[np.ndarray] = []
    for off, comp in zip(curve.offsets, curve.components):
        n = max(1, math.ceil(comp.length / spacing - 1e-12))
        us = comp.length * np.arange(0, n + 1) / n
        params.append(off + us)
        chunks.append(comp.points(us))
    return np.concatenate(params), np.vstack(chunks)


def _component_distances(pts: np.ndarray, comp: Component) -> np.ndarray:
    if isinstance(comp, SegmentComponent):
        a = np.asarray(comp.start, dtype=float)
        ab = np.asarray(comp.end, dtype=float) - a
        l2 = float(ab @ ab)
        t = np.clip(((pts - a) @ ab) / l2, 0.0, 1.0) if l2 > 0 else np.zeros(len(pts))
        return np.hypot(*(pts - a - t[:, None] * ab).T)
    rel = pts - np.asarray(comp.center, dtype=float)
    on_circle = np.abs(np.hypot(rel[:, 0], rel[:, 1]) - comp.radius)
    if abs(comp.sweep) >= TWO_PI:
        return on_circle
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    inside = np.mod(comp.side * (ang - comp.start_angle), TWO_PI) <= abs(comp.sweep)
    ends = np.minimum(
        np.hypot(*(pts - np.asarray(comp.start, dtype=float)).T),
        np.hypot(*(pts - np.asarray(comp.end, dtype=float)).T),
    )
    return np.where(inside, on_circle, ends)


def distance_to_curve(pts: np.ndarray, curve: Curve) -> np.ndarray:
    """Exact distance from each row of ``pts`` to the image of ``curve``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(curve, CsCurve):
        return np.min(np.vstack([_component_distances(pts, c) for c in curve.components]), axis=0)
    poly = curve.array()
    a, ab = poly[:-1], np.diff(poly, axis=0)
    l2 = np.einsum("ij,ij->i", ab, ab)
    out = np.empty(len(pts))
    for lo in range(0, len(pts), 512):
        chunk = pts[lo : lo + 512]
        rel = chunk[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("nmj,mj->nm", rel, ab) / np.where(l2 > 0, l2, 1.0), 0.0, 1.0)
        gap = rel - t[:, :, None] * ab[None, :, :]
        out[lo : lo + 512] = np.hypot(gap[:, :, 0], gap[:, :, 1]).min(axis=1)
    return out


def hausdorff(a: Curve, b: Curve, spacing: float | None = None) -> float:
    """Symmetric Hausdorff distance between the images of two curves.

    Samples of each curve are measured against the exact image of the other,
    so identical images give zero regardless of where they are sampled.
    """
    if isinstance(a, SampledCurve) and isinstance(b, SampledCurve):
        pa, pb = a.array(), b.array()
        return max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0])
    _, pa = curve_points(a, spacing)
    _, pb = curve_points(b, spacing)
    return float(max(distance_to_curve(pa, b).max(), distance_to_curve(pb, a).max()))


def translate(curve: CsCurve, dx: float, dy: float) -> CsCurve:
    comps: list[Component] = []
    for c in curve.components:
        if isinstance(c, ArcComponent):
            comps.append(ArcComponent(c.center.offset(dx, dy), c.radius, c.start_angle, c.sweep))
        else:
            comps.append(SegmentComponent(c.start.offset(dx, dy), c.end.offset(dx, dy)))
    return CsCurve(curve.kappa, tuple(comps))


def rotate(curve: CsCurve, center: Sequence[float], angle: float) -> CsCurve:
    """``curve`` rotated by ``angle`` about ``center``."""
    ca, sa = math.cos(angle), math.sin(angle)
    ox, oy = center[0], center[1]

    def turn(p: Point2) -> Point2:
        dx, dy = p.x - ox, p.y - oy
        return Point2(ox + ca * dx - sa * dy, oy + sa * dx + ca * dy)

    comps: list[Component] = []
    for c in curve.components:
        if isinstance(c, ArcComponent):
            comps.append(ArcComponent(turn(c.center), c.radius, c.start_angle + angle, c.sweep))
        else:
            comps.append(SegmentComponent(turn(c.start), turn(c.end)))
    return CsCurve(curve.kappa, tuple(comps))


# ---------------------------------------------------------------------------
# Detectors
# ---------------------------------------------------------------------------


class _HeadingPiece(NamedTuple):
    s0: float
    length: float
    heading0: float
    rate: float


_MAX_SAMPLED_PIECES = 64


def _heading_pieces(curve: Curve) -> list[_HeadingPiece]:
    if isinstance(curve, CsCurve):
        return [
            _HeadingPiece(off, c.length, _component_start_heading(c), c.curvature)
            for off, c in zip(curve.offsets, curve.components)
        ]
    cum = np.asarray(curve.cumulative_lengths)
    heads = curve.headings()
    idx = np.unique(np.linspace(0, len(cum) - 1, min(len(cum), _MAX_SAMPLED_PIECES + 1)).round().astype(int))
    pieces = []
    for a, b in zip(idx[:-1], idx[1:]):
        L = float(cum[b] - cum[a])
        if L <= 0:
            continue
        pieces.append(_HeadingPiece(float(cum[a]), L, float(heads[a]), float(heads[b] - heads[a]) / L))
    return pieces


class _Continuum(NamedTuple):
    t1: float
    t2: float
    box: tuple[float, float, float, float]  # t1 range, t2 range


def _antiparallel_in_pieces(p: _HeadingPiece, q: _HeadingPiece, same: bool, tol: float) -> list[_Continuum]:
    # heading_q(v) - heading_p(u) = pi + 2 pi n over u in [0, Lp], v in [0, Lq]
    base = q.heading0 - p.heading0
    corners = [base + q.rate * v - p.rate * u for u in (0.0, p.length) for v in (0.0, q.length)]
    n_lo = math.ceil((min(corners) - tol - math.pi) / TWO_PI)
    n_hi = math.floor((max(corners) + tol - math.pi) / TWO_PI)
    out: list[_Continuum] = []
    for n in range(n_lo, n_hi + 1):
        c = math.pi + TWO_PI * n - base
        if q.rate != 0.0:
            if same and c / q.rate <= 0.0:
                continue
            if p.rate != 0.0:
                lo, hi = sorted((-c / p.rate, (q.length * q.rate - c) / p.rate))
                slack = tol / abs(p.rate)
            else:
                v0 = c / q.rate
                if v0 < -tol / abs(q.rate) or v0 > q.length + tol / abs(q.rate):
                    continue
                lo, hi, slack = 0.0, p.length, 0.0
            lo, hi = max(lo, 0.0), min(hi, p.length)
            if hi < lo - slack:
                continue
            hi = max(hi, lo)
            lo, hi = min(lo, p.length), min(hi, p.length)
            vs = [min(max((c + p.rate * u) / q.rate, 0.0), q.length) for u in (lo, 0.5 * (lo + hi), hi)]
            u_box, v_box, u, v = (lo, hi), (min(vs), max(vs)), 0.5 * (lo + hi), vs[1]
        elif p.rate != 0.0:
            u = -c / p.rate
            if u < -tol / abs(p.rate) or u > p.length + tol / abs(p.rate):
                continue
            u = min(max(u, 0.0), p.length)
            u_box, v_box, v = (u, u), (0.0, q.length), 0.5 * q.length
        else:
            if same or abs(c) > tol:
                continue
            u_box, v_box = (0.0, p.length), (0.0, q.length)
            u, v = 0.5 * p.length, 0.5 * q.length
        box = (p.s0 + u_box[0], p.s0 + u_box[1], q.s0 + v_box[0], q.s0 + v_box[1])
        out.append(_Continuum(p.s0 + u, q.s0 + v, box))
    return out


def _touching(a: tuple[float, ...], b: tuple[float, ...], tol: float) -> bool:
    return a[0] <= b[1] + tol and b[0] <= a[1] + tol and a[2] <= b[3] + tol and b[2] <= a[3] + tol


def _merge_continua(found: list[_Continuum], tol: float) -> list[tuple[float, float]]:
    """One representative pair per connected group of solution boxes."""
    groups: list[list[_Continuum]] = []
    for item in found:
        hit = [g for g in groups if any(_touching(item.box, o.box, tol) for o in g)]
        merged = [item] + [o for g in hit for o in g]
        groups = [g for g in groups if not any(g is h for h in hit)] + [merged]
    out = []
    for g in groups:
        c1 = 0.5 * (min(o.box[0] for o in g) + max(o.box[1] for o in g))
        c2 = 0.5 * (min(o.box[2] for o in g) + max(o.box[3] for o in g))
        best = min(g, key=lambda o: math.hypot(o.t1 - c1, o.t2 - c2))
        out.append((best.t1, best.t2))
    return out


def find_parallel_tangents(curve: Curve) -> list[tuple[float, float]]:
    """Parameter pairs t1 < t2 with antiparallel tangents.

    Each continuum of solutions is reported once, also when it spans several
    constant-curvature pieces.
    """
    tol = settings.eps_angle
    pieces = _heading_pieces(curve)
    found: list[_Continuum] = []
    for i, p in enumerate(pieces):
        for j in range(i, len(pieces)):
            found.extend(_antiparallel_in_pieces(p, pieces[j], i == j, tol))
    pairs = [(t1, t2) for t1, t2 in _merge_continua(found, 1e-9) if t2 - t1 > settings.eps_join]
    return dedupe_pairs(pairs, 1e-9)


def _lateral_extremes(curve: CsCurve, band: Band) -> list[tuple[float, float]]:
    """(s, lateral) at component endpoints and at the arcs' lateral turning points."""
    ux, uy = band.axis_direction
    out: list[tuple[float, float]] = []
    for off, comp in zip(curve.offsets, curve.components):
        us = [0.0, comp.length]
        if isinstance(comp, ArcComponent):
            beta = math.atan2(-ux, uy)
            for a in (beta, beta + math.pi):
                extreme = (comp.center.x + comp.radius * math.cos(a), comp.center.y + comp.radius * math.sin(a))
                us.extend(comp.locate(extreme, 1e-9))
        pts = comp.points(np.asarray(us, dtype=float))
        lateral = band.coordinates(pts)[:, 0]
        out.extend((off + u, float(lat)) for u, lat in zip(us, lateral))
    return out


def find_cross_section(curve: Curve, band: Band) -> tuple[float, float] | None:
    """Parameters of a point strictly left of L1 and one strictly right of L2, if any."""
    if isinstance(curve, CsCurve):
        cands = _lateral_extremes(curve, band)
        s = np.asarray([c[0] for c in cands])
        lateral = np.asarray([c[1] for c in cands])
    else:
        s, pts = curve_points(curve)
        lateral = band.coordinates(pts)[:, 0]
    i_min, i_max = int(np.argmin(lateral)), int(np.argmax(lateral))
    if lateral[i_min] < -band.half_width and lateral[i_max] > band.half_width:
        t1, t2 = float(s[i_min]), float(s[i_max])
        return (min(t1, t2), max(t1, t2))
    return None


def _circle_circle(c1: Point2, r1: float, c2: Point2, r2: float, tol: float) -> list[tuple[float, float]]:
    d = c1.distance(c2)
    if d <= tol:
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - a * a
    if h2 < -tol * max(r1, 1.0):
        return []
    h = math.sqrt(max(h2, 0.0))
    ex, ey = (c2.x - c1.x) / d, (c2.y - c1.y) / d
    mx, my = c1.x + a * ex, c1.y + a * ey
    if h <= math.sqrt(tol):
        return [(mx, my)]
    return [(mx - h * ey, my + h * ex), (mx + h * ey, my - h * ex)]


def _line_circle(p: Point2, q: Point2, c: Point2, r: float, tol: float) -> list[tuple[float, float]]:
    dx, dy = q.x - p.x, q.y - p.y
    L = math.hypot(dx, dy)
    ux, uy = dx / L, dy / L
    fx, fy = p.x - c.x, p.y - c.y
    b = fx * ux + fy * uy
    disc = b * b - (fx * fx + fy * fy - r * r)
    if disc < -tol * max(r, 1.0):
        return []
    root = math.sqrt(max(disc, 0.0))
    ts = [-b] if root <= math.sqrt(tol) else [-b - root, -b + root]
    return [(p.x + t * ux, p.y + t * uy) for t in ts]


def _line_line(a: SegmentComponent, b: SegmentComponent, tol: float) -> list[tuple[float, float]]:
    rx, ry = a.end.x - a.start.x, a.end.y - a.start.y
    sx, sy = b.end.x - b.start.x, b.end.y - b.start.y
    den = cross(rx, ry, sx, sy)
    if abs(den) <= tol * a.length * b.length:
        # parallel: only shared endpoints count
        return [tuple(p) for p in (a.start, a.end, b.start, b.end)]
    t = cross(b.start.x - a.start.x, b.start.y - a.start.y, sx, sy) / den
    return [(a.start.x + t * rx, a.start.y + t * ry)]


def _raw_hits(a: Component, b: Component, tol: float) -> list[tuple[float, float]]:
    if isinstance(a, SegmentComponent) and isinstance(b, SegmentComponent):
        return _line_line(a, b, tol)
    if isinstance(a, SegmentComponent):
        return _line_circle(a.start, a.end, b.center, b.radius, tol)
    if isinstance(b, SegmentComponent):
        return _line_circle(b.start, b.end, a.center, a.radius, tol)
    if a.center.distance(b.center) <= tol and abs(a.radius - b.radius) <= tol:
        # cocircular: overlaps reduce to shared arc endpoints
        return [tuple(p) for p in (a.start, a.end, b.start, b.end)]
    return _circle_circle(a.center, a.radius, b.center, b.radius, tol)


def self_intersections(curve: CsCurve, tol: float = 1e-9) -> list[tuple[float, float]]:
    """Parameter pairs t1 < t2 with curve(t1) = curve(t2), tangential contacts included.

    Joints between consecutive components and the start/end identification of
    closed curves are not self intersections.
    """
    closed = curve.start_point.distance(curve.end_point) <= settings.eps_join
    L = curve.length
    hits: list[tuple[tuple[float, float], list[float]]] = []
    comps = curve.components
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            for pt in _raw_hits(comps[i], comps[j], tol):
                ui = comps[i].locate(pt, 1e-7)
                uj = comps[j].locate(pt, 1e-7)
                if not ui or not uj:
                    continue
                params = [curve.offsets[i] + u for u in ui] + [curve.offsets[j] + u for u in uj]
                hits.append((pt, params))
    if not hits:
        return []
    tree = cKDTree(np.asarray([h[0] for h in hits]))
    parent = list(range(len(hits)))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for a, b in tree.query_pairs(1e-6):
        parent[find(a)] = find(b)
    clusters: dict[int, list[float]] = {}
    for k, (_, params) in enumerate(hits):
        clusters.setdefault(find(k), []).extend(params)
    pairs: list[tuple[float, float]] = []
    for params in clusters.values():
        distinct: list[float] = []
        for t in sorted(0.0 if closed and abs(t - L) <= 1e-7 else t for t in params):
            if not distinct or t - distinct[-1] > 1e-7:
                distinct.append(t)
        for a_idx in range(len(distinct)):
            for b_idx in range(a_idx + 1, len(distinct)):
                pairs.append((distinct[a_idx], distinct[b_idx]))
    return sorted(pairs)
