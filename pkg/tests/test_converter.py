import json
import math

import pytest

from kcurves.converter import (
    canonical_json,
    emit_curve,
    emit_trace,
    parse_curve,
    parse_trace,
    read_bytes,
    trace_document,
    write_bytes,
)
from kcurves.errors import CurveValidationError, DomainError, FormatError, SchemaError
from kcurves.geometry import CsCurve, SampledCurve
from kcurves.homotopy import MoveKind, move_type3
from kcurves.schemas import CurveDocument


EXAMPLE = CurveDocument.model_config["json_schema_extra"]["example"]


def _doc(**overrides):
    doc = {**EXAMPLE, **overrides}
    return json.dumps(doc)


class TestCanonicalJson:
    def test_layout(self):
        """Keys are sorted, reals keep 17 digits and scalar lists stay inline."""
        out = canonical_json({"b": 1, "a": [0.1, 2]})
        assert out == b'{\n  "a": [0.10000000000000001, 2],\n  "b": 1\n}\n'

    def test_nested(self):
        """Lists of objects are indented one level per nesting."""
        out = canonical_json({"k": [{"x": True}]})
        assert out == b'{\n  "k": [\n    {\n      "x": true\n    }\n  ]\n}\n'

    def test_non_finite(self):
        """NaN and infinities cannot be written."""
        with pytest.raises(DomainError):
            canonical_json({"v": math.inf})


class TestParseCurve:
    def test_example(self):
        """The schema example parses to the unit segment."""
        curve = parse_curve(_doc())
        assert isinstance(curve, CsCurve)
        assert curve.length == pytest.approx(1.0)

    def test_negative_kappa(self):
        """kappa must be positive; the error names the field."""
        with pytest.raises(SchemaError) as info:
            parse_curve(_doc(kappa=-1.0))
        assert info.value.field == "kappa"

    def test_infinite_kappa(self):
        """kappa must be finite."""
        with pytest.raises(SchemaError) as info:
            parse_curve(_doc(kappa=math.inf))
        assert info.value.field == "kappa"

    def test_nan_coordinate(self):
        """NaN coordinates are schema errors instead of degenerate components."""
        seg = {"type": "segment", "start": [1.0, 0.0], "end": [math.nan, math.nan]}
        first = {"type": "segment", "start": [0.0, 0.0], "end": [1.0, 0.0]}
        with pytest.raises(SchemaError) as info:
            parse_curve(_doc(components=[first, seg]))
        assert info.value.field.startswith("components.1")

    def test_unknown_field(self):
        """Unknown top-level fields are rejected."""
        with pytest.raises(SchemaError) as info:
            parse_curve(_doc(color="red"))
        assert info.value.field == "color"

    def test_kind_payload_mismatch(self):
        """A cs document cannot carry sample points."""
        with pytest.raises(SchemaError):
            parse_curve(_doc(points=[[0, 0], [1, 0]]))

    def test_tight_arc(self):
        """An arc of radius r/2 parses but fails validation."""
        arc = {"type": "arc", "center": [0.5, 0.0], "radius": 0.5, "start_angle": math.pi, "sweep": -math.pi}
        with pytest.raises(CurveValidationError) as info:
            parse_curve(_doc(components=[arc]))
        assert info.value.report.violations[0].kind == "curvature"
        assert isinstance(parse_curve(_doc(components=[arc]), check=False), CsCurve)

    def test_bad_json(self):
        """Syntax errors carry the line number."""
        with pytest.raises(FormatError) as info:
            parse_curve('{\n  "kappa": 1.0,\n  oops\n}')
        assert info.value.line == 3

    def test_duplicate_samples(self):
        """Repeated consecutive samples name the offending point."""
        doc = _doc(kind="sampled", components=None, points=[[0, 0], [1, 0], [1, 0], [2, 1]])
        with pytest.raises(FormatError) as info:
            parse_curve(doc)
        assert info.value.field == "points.2"

    def test_sampled(self):
        """Gently curving samples parse to a sampled curve."""
        pts = [[math.cos(t / 10), math.sin(t / 10)] for t in range(10)]
        curve = parse_curve(_doc(kind="sampled", components=None, points=pts))
        assert isinstance(curve, SampledCurve)
        assert len(curve.points) == 10


class TestEmit:
    def test_bytes_stable(self, lens):
        """Emitting a parsed document reproduces it byte for byte."""
        data = emit_curve(lens.longer_arc(1))
        assert emit_curve(parse_curve(data)) == data

    def test_curve_document(self, unit_segment):
        """Emitted curves carry the version, kappa, kind and components."""
        doc = json.loads(emit_curve(unit_segment))
        assert doc["format_version"] == "1"
        assert doc["kind"] == "cs"
        assert doc["components"] == [{"type": "segment", "start": [0.0, 0.0], "end": [1.0, 0.0]}]


class TestTrace:
    def test_trace_round_trip(self, unit_circle):
        """Parsed traces keep their frames and moves."""
        trace = move_type3(unit_circle, 0.0, math.pi, 1.0, steps=2)
        back = parse_trace(emit_trace(trace))
        assert len(back) == len(trace)
        assert back.moves[0].kind is MoveKind.TYPE_III
        assert back.last.length == pytest.approx(trace.last.length)

    def test_endpoints_must_match(self, unit_circle):
        """The first frame has to start and end at the declared endpoints."""
        doc = trace_document(move_type3(unit_circle, 0.0, math.pi, 1.0, steps=1))
        doc["endpoints"] = [[0.0, 0.0], [5.0, 0.0]]
        with pytest.raises(SchemaError) as info:
            parse_trace(canonical_json(doc))
        assert info.value.field == "endpoints"

    def test_frame_parameters(self):
        """Frame parameters must run from 0 to 1."""
        seg = {"type": "segment", "start": [0, 0], "end": [1, 0]}
        doc = {
            "format_version": "1",
            "kappa": 1.0,
            "endpoints": [[0, 0], [1, 0]],
            "frames": [{"p": 0.0, "components": [seg]}, {"p": 0.5, "components": [seg]}],
        }
        with pytest.raises(SchemaError):
            parse_trace(json.dumps(doc))


class TestFiles:
    def test_write_and_read(self, tmp_path, unit_segment):
        """Documents survive a trip through the filesystem."""
        path = tmp_path / "segment.json"
        write_bytes(path, emit_curve(unit_segment))
        assert parse_curve(read_bytes(path)).length == pytest.approx(1.0)

    def test_missing_file(self, tmp_path):
        """Unreadable paths are format errors."""
        with pytest.raises(FormatError):
            read_bytes(tmp_path / "missing.json")
