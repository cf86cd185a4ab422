"""Curve and trace documents: parsing, validation and canonical emission."""
from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Sequence

from pydantic import BaseModel, ValidationError

from .config import settings
from .errors import CurveValidationError, DomainError, FormatError, SchemaError
from .geometry import ArcComponent, Component, CsCurve, Curve, KappaParams, Point2, SampledCurve, SegmentComponent
from .homotopy import ElementaryMove, Frame, HomotopyTrace, MoveKind
from .schemas import FORMAT_VERSION, ArcModel, CurveDocument, SegmentModel, TraceDocument
from .validation import validate

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Canonical text
# ---------------------------------------------------------------------------


def _real(v: float) -> str:
    if not math.isfinite(v):
        raise DomainError(f"cannot emit non-finite number {v}")
    return format(v, ".17g")


def _scalar(value: Any) -> str | None:
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _real(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return None


def _render(value: Any, level: int = 0) -> str:
    flat = _scalar(value)
    if flat is not None:
        return flat
    pad, close = "  " * (level + 1), "  " * level
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_render(value[k], level + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        scalars = [_scalar(v) for v in value]
        if all(s is not None for s in scalars):
            return "[" + ", ".join(scalars) + "]"
        return "[\n" + ",\n".join(pad + _render(v, level + 1) for v in value) + "\n" + close + "]"
    if hasattr(value, "item"):  # numpy scalar
        return _render(value.item(), level)
    raise DomainError(f"cannot emit value of type {type(value).__name__}")


def canonical_json(document: Any) -> bytes:
    """Sorted keys, 17 significant digits, two-space indent, trailing newline."""
    return (_render(document) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _load(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"document is not UTF-8: {e.reason}") from e
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", line=e.lineno) from e


def _model(cls: type[BaseModel], raw: Any) -> Any:
    try:
        return cls.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise SchemaError(first["msg"], field=where or None) from e


def _component(model: SegmentModel | ArcModel) -> Component:
    if isinstance(model, SegmentModel):
        return SegmentComponent(Point2(*model.start), Point2(*model.end))
    return ArcComponent(Point2(*model.center), model.radius, model.start_angle, model.sweep)


def _cs_curve(kappa: KappaParams, models: Sequence[SegmentModel | ArcModel], where: str) -> CsCurve:
    try:
        return CsCurve(kappa, tuple(_component(m) for m in models))
    except DomainError as e:
        raise SchemaError(str(e), field=where) from e


def _component_payload(comp: Component) -> dict[str, Any]:
    if isinstance(comp, SegmentComponent):
        return {"type": "segment", "start": list(comp.start), "end": list(comp.end)}
    return {
        "type": "arc",
        "center": list(comp.center),
        "radius": comp.radius,
        "start_angle": comp.start_angle,
        "sweep": comp.sweep,
    }


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------


def parse_curve(data: bytes | str, *, check: bool = True) -> Curve:
    """Parse a curve document.

    Syntax problems raise ``FormatError`` (with the line), schema problems
    ``SchemaError`` (with the field path) and, when ``check`` is set, a
    curve that is not kappa-constrained raises ``CurveValidationError``.
    """
    doc: CurveDocument = _model(CurveDocument, _load(data))
    kappa = KappaParams(doc.kappa)
    if doc.kind == "cs":
        curve: Curve = _cs_curve(kappa, doc.components or [], "components")
    else:
        pts = doc.points or []
        for i, (a, b) in enumerate(zip(pts, pts[1:])):
            if a == b:
                raise FormatError("duplicate consecutive sample point", field=f"points.{i + 1}")
        curve = SampledCurve.from_points(kappa, pts)
    if check:
        report = validate(curve)
        if not report.valid:
            raise CurveValidationError(f"curve is not kappa-constrained: {report.violations[0]}", report)
    return curve


def curve_document(curve: Curve) -> dict[str, Any]:
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "kappa": curve.kappa.kappa}
    if isinstance(curve, SampledCurve):
        doc["kind"] = "sampled"
        doc["points"] = [list(p) for p in curve.points]
    else:
        doc["kind"] = "cs"
        doc["components"] = [_component_payload(c) for c in curve.components]
    return doc


def emit_curve(curve: Curve) -> bytes:
    return canonical_json(curve_document(curve))


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def parse_trace(data: bytes | str) -> HomotopyTrace:
    """Parse a trace document. Frames are not validated here; see ``verify_trace``."""
    doc: TraceDocument = _model(TraceDocument, _load(data))
    kappa = KappaParams(doc.kappa)
    frames = tuple(
        Frame(f.p, _cs_curve(kappa, f.components, f"frames.{i}.components")) for i, f in enumerate(doc.frames)
    )
    x, y = doc.endpoints
    first = frames[0].curve
    tol = settings.eps_join * max(1.0, kappa.r)
    if first.start_point.distance(x) > tol or first.end_point.distance(y) > tol:
        raise SchemaError("first frame does not join the declared endpoints", field="endpoints")
    moves = tuple(ElementaryMove(MoveKind(m.kind), m.start_index, m.end_index, dict(m.params)) for m in doc.moves)
    try:
        return HomotopyTrace(frames, moves)
    except DomainError as e:
        raise SchemaError(str(e), field="frames") from e


def trace_document(trace: HomotopyTrace) -> dict[str, Any]:
    first = trace.first
    return {
        "format_version": FORMAT_VERSION,
        "kappa": trace.kappa.kappa,
        "endpoints": [list(first.start_point), list(first.end_point)],
        "frames": [
            {"p": f.p, "components": [_component_payload(c) for c in f.curve.components]} for f in trace.frames
        ],
        "moves": [
            {"kind": m.kind.value, "start_index": m.start_index, "end_index": m.end_index, "params": m.params}
            for m in trace.moves
        ],
    }


def emit_trace(trace: HomotopyTrace) -> bytes:
    return canonical_json(trace_document(trace))


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e


def write_bytes(path: str | Path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise FormatError(f"cannot write {path}: {e.strerror}") from e
    logger.info(f"wrote {len(data)} bytes to {path}")
