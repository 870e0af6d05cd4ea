"""Pydantic request/response models for the HTTP service.

These mirror the core types one-to-one; conversion helpers translate
between the wire models and the internal dataclasses so the endpoints
stay thin shells over the library.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..analytics import WindowFeatures
from ..model import (
    AttentionFeatures,
    AttitudeFeatures,
    EmotionLabel,
    FrameRecord,
    GazeEntity,
    GazePointRecord,
    LabelStream,
    MpesWindowScore,
    OmePeriod,
    Rect,
    RegionConfig,
)
from ..synth import GeneratorSpec

GazeToken = Literal["tablet", "facilitator", "elsewhere", "undetected"]
EmotionToken = Literal[
    "anger", "disgust", "fear", "happiness", "sadness", "surprise", "neutral", "undetected"
]
SubjectToken = Literal["pwd", "facilitator"]


class RectModel(BaseModel):
    x: float
    y: float
    w: float = Field(gt=0)
    h: float = Field(gt=0)

    def to_core(self) -> Rect:
        return Rect(self.x, self.y, self.w, self.h)


class RegionConfigModel(BaseModel):
    frame_width: int = Field(gt=0)
    frame_height: int = Field(gt=0)
    target_activity_space: RectModel
    facilitator: RectModel
    subject: RectModel

    def to_core(self) -> RegionConfig:
        return RegionConfig(
            target_activity_space=self.target_activity_space.to_core(),
            facilitator=self.facilitator.to_core(),
            subject=self.subject.to_core(),
            frame_width=self.frame_width,
            frame_height=self.frame_height,
        )


class GazePointModel(BaseModel):
    frame: int = Field(ge=0)
    subject: SubjectToken = "pwd"
    x: Optional[float] = None
    y: Optional[float] = None
    detected: bool = True

    def to_core(self) -> GazePointRecord:
        return GazePointRecord(
            frame_index=self.frame,
            subject_id=self.subject,
            gaze_x=self.x,
            gaze_y=self.y,
            detected=self.detected,
        )


class FrameRecordModel(BaseModel):
    frame: int = Field(ge=0)
    subject: SubjectToken = "pwd"
    gaze: GazeToken
    emotion: EmotionToken = "undetected"

    def to_core(self) -> FrameRecord:
        return FrameRecord(
            frame_index=self.frame,
            gaze=GazeEntity(self.gaze),
            emotion=EmotionLabel(self.emotion),
            subject_id=self.subject,
        )

    @classmethod
    def from_core(cls, rec: FrameRecord) -> "FrameRecordModel":
        return cls(
            frame=rec.frame_index,
            subject=rec.subject_id,
            gaze=rec.gaze.value,
            emotion=rec.emotion.value,
        )


class LabelStreamModel(BaseModel):
    session_id: str = "session"
    fps: float = Field(gt=0)
    records: list[FrameRecordModel] = Field(min_length=1)

    def to_core(self) -> LabelStream:
        return LabelStream(
            session_id=self.session_id,
            fps=self.fps,
            records=tuple(r.to_core() for r in self.records),
        )

    @classmethod
    def from_core(cls, stream: LabelStream) -> "LabelStreamModel":
        return cls(
            session_id=stream.session_id,
            fps=stream.fps,
            records=[FrameRecordModel.from_core(r) for r in stream.records],
        )


class AssignRequest(BaseModel):
    points: list[GazePointModel]
    regions: RegionConfigModel
    smooth_window: int = 1


class AssignResponse(BaseModel):
    labels: list[GazeToken]


class AttentionFeaturesModel(BaseModel):
    prop_tablet: float
    prop_facilitator: float
    prop_elsewhere: float
    ep_mean_tablet: float
    ep_std_tablet: float
    ep_mean_facilitator: float
    ep_std_facilitator: float
    ep_mean_elsewhere: float
    ep_std_elsewhere: float
    trans_tablet_facilitator: float
    trans_tablet_elsewhere: float
    trans_facilitator_tablet: float
    trans_facilitator_elsewhere: float
    trans_elsewhere_tablet: float
    trans_elsewhere_facilitator: float
    flux_in_tablet: float
    flux_out_tablet: float
    flux_in_facilitator: float
    flux_out_facilitator: float
    flux_in_elsewhere: float
    flux_out_elsewhere: float
    detected_coverage: float
    ep_count_tablet: int
    ep_count_facilitator: int
    ep_count_elsewhere: int

    @classmethod
    def from_core(cls, f: AttentionFeatures) -> "AttentionFeaturesModel":
        return cls(
            **f.to_dict(),
            detected_coverage=f.detected_coverage,
            ep_count_tablet=f.ep_count_tablet,
            ep_count_facilitator=f.ep_count_facilitator,
            ep_count_elsewhere=f.ep_count_elsewhere,
        )

    def to_core(self) -> AttentionFeatures:
        return AttentionFeatures(**self.model_dump())


class AttitudeFeaturesModel(BaseModel):
    prop_positive: float
    prop_negative: float
    detected_coverage: float

    @classmethod
    def from_core(cls, f: AttitudeFeatures) -> "AttitudeFeaturesModel":
        return cls(
            prop_positive=f.prop_positive,
            prop_negative=f.prop_negative,
            detected_coverage=f.detected_coverage,
        )

    def to_core(self) -> AttitudeFeatures:
        return AttitudeFeatures(**self.model_dump())


class WindowFeaturesModel(BaseModel):
    window_index: int
    start_frame: int
    end_frame: int
    partial: bool
    attention: Optional[AttentionFeaturesModel] = None
    attitude: Optional[AttitudeFeaturesModel] = None

    @classmethod
    def from_core(cls, index: int, wf: WindowFeatures) -> "WindowFeaturesModel":
        return cls(
            window_index=index,
            start_frame=wf.window.start_frame,
            end_frame=wf.window.end_frame,
            partial=wf.window.partial,
            attention=AttentionFeaturesModel.from_core(wf.attention) if wf.attention else None,
            attitude=AttitudeFeaturesModel.from_core(wf.attitude) if wf.attitude else None,
        )


class FeaturesRequest(BaseModel):
    stream: LabelStreamModel
    window_seconds: float = Field(gt=0)
    subject: SubjectToken = "pwd"
    min_episode_frames: int = Field(default=0, ge=0)
    max_gap_frames: int = Field(default=0, ge=0)


class FeaturesResponse(BaseModel):
    windows: list[WindowFeaturesModel]


class MpesScoreModel(BaseModel):
    window_index: int = Field(ge=0)
    active: int = Field(ge=0, le=2)
    passive: int = Field(ge=0, le=2)
    other: int = Field(ge=0, le=2)

    def to_core(self) -> MpesWindowScore:
        return MpesWindowScore(
            window_index=self.window_index,
            active=self.active,
            passive=self.passive,
            other=self.other,
        )


class MpesValidateRequest(BaseModel):
    features: list[Optional[AttentionFeaturesModel]]
    scores: list[MpesScoreModel]
    method: Literal["pearson", "spearman"] = "pearson"


class OmePeriodModel(BaseModel):
    start_s: float = Field(ge=0)
    end_s: float
    attention: int = Field(ge=1, le=7)
    attitude: int = Field(ge=1, le=7)

    def to_core(self) -> OmePeriod:
        return OmePeriod(
            start_s=self.start_s,
            end_s=self.end_s,
            attention=self.attention,
            attitude=self.attitude,
        )


class OmeSessionModel(BaseModel):
    stream: LabelStreamModel
    periods: list[OmePeriodModel] = Field(min_length=1)


class OmeValidateRequest(BaseModel):
    sessions: list[OmeSessionModel] = Field(min_length=1)
    min_episode_frames: int = Field(default=0, ge=0)


class AttitudeCorrelationRequest(BaseModel):
    attitude: list[AttitudeFeaturesModel]
    pleasure_scores: list[float]


class CorrelationResultModel(BaseModel):
    r: float
    p_value: float
    n: int
    significance: Literal["significant", "marginal", "none"]


class SynthRequest(BaseModel):
    spec: dict
    format: Literal["json", "csv"] = "json"


class SynthResponse(BaseModel):
    stream: Optional[LabelStreamModel] = None
    csv: Optional[str] = None


def generator_spec_from_request(req: SynthRequest) -> GeneratorSpec:
    return GeneratorSpec.from_dict(req.spec)
