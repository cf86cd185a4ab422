from __future__ import annotations

from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


FORMAT_VERSION = "1"

Vec2 = tuple[float, float]


class SegmentModel(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    type: Literal["segment"]
    start: Vec2 = Field(description="Start point [x, y]", examples=[[0.0, 0.0]])
    end: Vec2 = Field(description="End point [x, y]", examples=[[1.0, 0.0]])


class ArcModel(BaseModel):
    """
    Circular arc, counterclockwise for a positive sweep.

    The arc starts at ``center + radius * (cos(start_angle), sin(start_angle))``
    and its radius must equal 1/kappa of the enclosing document.
    """
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    type: Literal["arc"]
    center: Vec2 = Field(description="Circle center [x, y]")
    radius: float = Field(gt=0, description="Circle radius")
    start_angle: float = Field(description="Polar angle of the start point about the center, radians")
    sweep: float = Field(description="Signed swept angle, radians (positive = left turn)")


ComponentModel = Annotated[Union[SegmentModel, ArcModel], Field(discriminator="type")]


class CurveDocument(BaseModel):
    """
    A single curve with one global curvature bound.

    Two kinds:
    - 'cs': concatenation of arcs and segments (``components``)
    - 'sampled': polyline samples of a smooth curve (``points``)
    """
    model_config = ConfigDict(
        extra="forbid",
        allow_inf_nan=False,
        json_schema_extra={
            "example": {
                "format_version": "1",
                "kappa": 1.0,
                "kind": "cs",
                "components": [{"type": "segment", "start": [0, 0], "end": [1, 0]}],
            }
        },
    )

    format_version: Literal["1"] = Field(description="Document format version")
    kappa: float = Field(gt=0, description="Curvature bound kappa = 1/r", examples=[1.0, 0.5])
    kind: Literal["cs", "sampled"] = Field(description="Curve representation")
    components: Optional[list[ComponentModel]] = Field(
        default=None, description="Arcs and segments in order (kind 'cs' only)"
    )
    points: Optional[list[Vec2]] = Field(
        default=None, description="Sample points in order (kind 'sampled' only)"
    )

    @model_validator(mode="after")
    def _payload_matches_kind(self) -> "CurveDocument":
        if self.kind == "cs":
            if not self.components or self.points is not None:
                raise ValueError("kind 'cs' needs a non-empty 'components' list and no 'points'")
        else:
            if not self.points or len(self.points) < 2 or self.components is not None:
                raise ValueError("kind 'sampled' needs at least two 'points' and no 'components'")
        return self


class FrameModel(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    p: float = Field(ge=0.0, le=1.0, description="Homotopy parameter of the frame")
    components: list[ComponentModel] = Field(min_length=1)


class MoveModel(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    kind: Literal["TypeI", "TypeII", "TypeIII", "FragmentReplacement"]
    start_index: int = Field(ge=0, description="First frame index covered by the move")
    end_index: int = Field(ge=0, description="Last frame index covered by the move")
    params: dict[str, Any] = Field(default_factory=dict, description="Parameters that regenerate the frames")


class TraceDocument(BaseModel):
    """Discretized homotopy: frames with strictly increasing p from 0 to 1."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    format_version: Literal["1"]
    kappa: float = Field(gt=0)
    endpoints: tuple[Vec2, Vec2] = Field(description="Fixed endpoints [x, y] shared by every frame")
    frames: list[FrameModel] = Field(min_length=1)
    moves: list[MoveModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_parameters(self) -> "TraceDocument":
        ps = [f.p for f in self.frames]
        if ps[0] != 0.0 or (len(ps) > 1 and ps[-1] != 1.0):
            raise ValueError("frame parameters must run from 0 to 1")
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("frame parameters must be strictly increasing")
        for m in self.moves:
            if not m.start_index <= m.end_index < len(self.frames):
                raise ValueError(f"move {m.kind} spans frames outside the trace")
        return self
