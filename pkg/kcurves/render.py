"""SVG pictures of curves, lenses and homotopy filmstrips."""
from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
import svgwrite  # type: ignore[reportMissingTypeStubs]

from .errors import DomainError
from .geometry import ArcComponent, CsCurve, Curve, SampledCurve, curve_points, reverse
from .homotopy import HomotopyTrace
from .regions import LensGeometry, build_lens
from .utils import TWO_PI

logger = logging.getLogger(__name__)

Renderable = Union[CsCurve, SampledCurve, HomotopyTrace, LensGeometry]

MARGIN = 0.05
CURVE_COLOR = "#1f4e9c"
CIRCLE_COLOR = "#777"
LENS_FILL = "#e8a33d"
LOBE_FILL = "#9ec5e8"


def _fmt(v: float) -> str:
    return f"{v:.6f}".rstrip("0").rstrip(".")


def _arc_commands(comp: ArcComponent) -> list[str]:
    # full turns are drawn as two halves; a single SVG arc cannot close on itself
    pieces = [comp] if abs(comp.sweep) < TWO_PI - 1e-9 else [comp.trimmed(0.0, comp.length / 2), comp.trimmed(comp.length / 2, comp.length)]
    out = []
    for piece in pieces:
        large = 1 if abs(piece.sweep) > math.pi else 0
        sweep = 1 if piece.sweep > 0 else 0
        r = _fmt(piece.radius)
        out.append(f"A {r} {r} 0 {large} {sweep} {_fmt(piece.end.x)} {_fmt(piece.end.y)}")
    return out


def path_data(curve: CsCurve) -> str:
    """SVG path data: segments as lines, arcs as elliptical-arc commands."""
    start = curve.start_point
    cmds = [f"M {_fmt(start.x)} {_fmt(start.y)}"]
    for comp in curve.components:
        if isinstance(comp, ArcComponent):
            cmds.extend(_arc_commands(comp))
        else:
            cmds.append(f"L {_fmt(comp.end.x)} {_fmt(comp.end.y)}")
    return " ".join(cmds)


def _pick_frames(trace: HomotopyTrace, limit: int | None) -> list[CsCurve]:
    curves = trace.curves
    if limit is None or limit >= len(curves):
        return curves
    if limit < 2:
        return [curves[-1]]
    idx = np.unique(np.round(np.linspace(0, len(curves) - 1, limit)).astype(int))
    return [curves[i] for i in idx]


def _bounds(curves: list[Curve], lens: LensGeometry | None) -> tuple[float, float, float, float]:
    chunks = [curve_points(c)[1] for c in curves]
    if lens is not None:
        for c in lens.centers:
            chunks.append(np.array([[c.x - lens.r, c.y - lens.r], [c.x + lens.r, c.y + lens.r]]))
    pts = np.vstack(chunks)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = max(float(np.max(hi - lo)), 1e-9)
    m = MARGIN * extent
    return float(lo[0] - m), float(lo[1] - m), float(hi[0] - lo[0] + 2 * m), float(hi[1] - lo[1] + 2 * m)


def _draw_regions(dwg: svgwrite.Drawing, parent: svgwrite.container.Group, lens: LensGeometry, stroke: float) -> None:
    g = dwg.g(id="regions")
    for i, c in enumerate(lens.centers, start=1):
        g.add(dwg.circle(center=(c.x, c.y), r=lens.r, fill=LOBE_FILL, fill_opacity=0.25,
                         stroke=CIRCLE_COLOR, stroke_width=stroke, id=f"circle-{i}"))
    boundary = CsCurve(lens.kappa, lens.shorter_arc(1).components + reverse(lens.shorter_arc(2)).components)
    g.add(dwg.path(d=path_data(boundary) + " Z", fill=LENS_FILL, fill_opacity=0.6, stroke="none", id="lens"))
    parent.add(g)


def _draw_curve(dwg: svgwrite.Drawing, parent: svgwrite.container.Group, curve: Curve, stroke: float, opacity: float, cls: str) -> None:
    if isinstance(curve, SampledCurve):
        parent.add(dwg.polyline(points=[(p.x, p.y) for p in curve.points], fill="none", stroke=CURVE_COLOR,
                                stroke_width=stroke, stroke_opacity=opacity, class_=cls))
    else:
        parent.add(dwg.path(d=path_data(curve), fill="none", stroke=CURVE_COLOR,
                            stroke_width=stroke, stroke_opacity=opacity, class_=cls))


def _lens_for(curve: Curve) -> LensGeometry | None:
    try:
        return build_lens(curve.start_point, curve.end_point, curve.kappa)
    except DomainError as e:
        logger.debug(f"no regions to draw: {e}")
        return None


def render_svg(item: Renderable, *, regions: bool = False, frames: int | None = None, size: tuple[int, int] = (800, 600)) -> bytes:
    """Render a curve, a trace (overlaid frames with an opacity ramp) or a lens.

    The y axis points up; the viewBox holds all geometry with a 5% margin.
    """
    if isinstance(item, LensGeometry):
        curves: list[Curve] = [item.longer_arc(1), item.longer_arc(2)]
        lens: LensGeometry | None = item
        drawn: list[Curve] = []
    else:
        drawn = _pick_frames(item, frames) if isinstance(item, HomotopyTrace) else [item]
        curves = drawn
        lens = _lens_for(drawn[0]) if regions else None
    x0, y0, w, h = _bounds(curves, lens)
    stroke = 0.004 * max(w, h)

    dwg = svgwrite.Drawing(size=(f"{size[0]}px", f"{size[1]}px"), profile="full")
    dwg.attribs["viewBox"] = f"{_fmt(x0)} {_fmt(-(y0 + h))} {_fmt(w)} {_fmt(h)}"
    scene = dwg.g(id="scene", transform="scale(1,-1)")
    if lens is not None:
        _draw_regions(dwg, scene, lens, stroke)
    layer = dwg.g(id="curves")
    n = len(drawn)
    for i, curve in enumerate(drawn):
        opacity = 1.0 if n == 1 else 0.15 + 0.85 * i / (n - 1)
        _draw_curve(dwg, layer, curve, stroke, opacity, "frame" if isinstance(item, HomotopyTrace) else "curve")
    scene.add(layer)
    dwg.add(scene)
    logger.info(f"rendered {n} curve(s){' with regions' if lens is not None else ''}")
    return dwg.tostring().encode("utf-8")
