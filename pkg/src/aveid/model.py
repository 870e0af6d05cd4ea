"""Core domain types shared by all modules.

Pure data: no I/O, no statistics. All types are immutable after
construction and enforce their invariants in ``__post_init__``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidModelError

SUBJECT_PWD = "pwd"
SUBJECT_FACILITATOR = "facilitator"
VALID_SUBJECTS = (SUBJECT_PWD, SUBJECT_FACILITATOR)


class GazeEntity(str, Enum):
    """Where the monitored person is looking in a given frame."""

    TABLET = "tablet"
    FACILITATOR = "facilitator"
    ELSEWHERE = "elsewhere"
    UNDETECTED = "undetected"


# The three-entity analytics alphabet. UNDETECTED marks frames where the
# upstream detector produced no usable output and is never part of it.
ANALYTICS_ENTITIES = (GazeEntity.TABLET, GazeEntity.FACILITATOR, GazeEntity.ELSEWHERE)

# The six ordered pairs of distinct entities, in canonical order.
TRANSITION_PAIRS = tuple(
    (a, b) for a in ANALYTICS_ENTITIES for b in ANALYTICS_ENTITIES if a is not b
)


class EmotionLabel(str, Enum):
    """Per-frame facial emotion class from the upstream detector."""

    ANGER = "anger"
    DISGUST = "disgust"
    FEAR = "fear"
    HAPPINESS = "happiness"
    SADNESS = "sadness"
    SURPRISE = "surprise"
    NEUTRAL = "neutral"
    UNDETECTED = "undetected"


# Detector classes, excluding UNDETECTED, in canonical order.
EMOTION_CLASSES = (
    EmotionLabel.ANGER,
    EmotionLabel.DISGUST,
    EmotionLabel.FEAR,
    EmotionLabel.HAPPINESS,
    EmotionLabel.SADNESS,
    EmotionLabel.SURPRISE,
    EmotionLabel.NEUTRAL,
)

# Affect valence buckets. FEAR and SURPRISE belong to neither bucket: they
# count toward the detected denominator only.
POSITIVE_EMOTIONS = frozenset({EmotionLabel.NEUTRAL, EmotionLabel.HAPPINESS})
NEGATIVE_EMOTIONS = frozenset(
    {EmotionLabel.ANGER, EmotionLabel.SADNESS, EmotionLabel.DISGUST}
)


@dataclass(frozen=True, slots=True)
class FrameRecord:
    """One frame's gaze and emotion labels for one subject.

    Timestamps are derived (``frame_index / fps``), never stored.
    """

    frame_index: int
    gaze: GazeEntity
    emotion: EmotionLabel
    subject_id: str = SUBJECT_PWD

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvalidModelError(f"frame_index must be >= 0, got {self.frame_index}")
        if self.subject_id not in VALID_SUBJECTS:
            raise InvalidModelError(
                f"subject_id must be one of {VALID_SUBJECTS}, got {self.subject_id!r}"
            )

    def time_s(self, fps: float) -> float:
        return self.frame_index / fps


@dataclass(frozen=True)
class LabelStream:
    """Time-ordered per-frame records for one recorded session.

    May interleave records for both subjects; per subject, frame indices are
    strictly increasing and unique.
    """

    session_id: str
    fps: float
    records: tuple[FrameRecord, ...]

    def __post_init__(self):
        if self.fps <= 0 or not math.isfinite(self.fps):
            raise InvalidModelError(f"fps must be positive and finite, got {self.fps}")
        if not self.records:
            raise InvalidModelError("LabelStream must contain at least one record")
        object.__setattr__(self, "records", tuple(self.records))
        last: dict[str, int] = {}
        for rec in self.records:
            prev = last.get(rec.subject_id)
            if prev is not None and rec.frame_index <= prev:
                raise InvalidModelError(
                    f"frame {rec.frame_index} for subject '{rec.subject_id}' "
                    f"repeats or precedes frame {prev}"
                )
            last[rec.subject_id] = rec.frame_index

    def subjects(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for rec in self.records:
            seen.setdefault(rec.subject_id, None)
        return tuple(seen)

    def records_for(self, subject_id: str) -> tuple[FrameRecord, ...]:
        return tuple(r for r in self.records if r.subject_id == subject_id)

    def first_frame(self, subject_id: str | None = None) -> int:
        frames = [
            r.frame_index
            for r in self.records
            if subject_id is None or r.subject_id == subject_id
        ]
        if not frames:
            raise InvalidModelError(f"no records for subject {subject_id!r}")
        return min(frames)

    def last_frame(self, subject_id: str | None = None) -> int:
        frames = [
            r.frame_index
            for r in self.records
            if subject_id is None or r.subject_id == subject_id
        ]
        if not frames:
            raise InvalidModelError(f"no records for subject {subject_id!r}")
        return max(frames)

    def n_frames(self) -> int:
        """Frame span of the session (first to last record, inclusive)."""
        return self.last_frame() - self.first_frame() + 1

    def duration_s(self) -> float:
        return self.n_frames() / self.fps

    def gaze_labels(self, subject_id: str = SUBJECT_PWD) -> list[GazeEntity]:
        """Per-frame gaze labels over the session span for one subject.

        Frames inside the span with no record for the subject are filled
        with UNDETECTED, so the result always has ``n_frames()`` entries
        aligned to ``first_frame()``.
        """
        first = self.first_frame()
        labels = [GazeEntity.UNDETECTED] * self.n_frames()
        for rec in self.records:
            if rec.subject_id == subject_id:
                labels[rec.frame_index - first] = rec.gaze
        return labels

    def emotion_labels(self, subject_id: str = SUBJECT_PWD) -> list[EmotionLabel]:
        """Per-frame emotion labels, filled with UNDETECTED like gaze_labels."""
        first = self.first_frame()
        labels = [EmotionLabel.UNDETECTED] * self.n_frames()
        for rec in self.records:
            if rec.subject_id == subject_id:
                labels[rec.frame_index - first] = rec.emotion
        return labels


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned pixel rectangle, top-left anchored.

    Containment is half-open: ``[x, x+w) x [y, y+h)``, so adjacent rects
    never double-claim a point.
    """

    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidModelError(
                f"rect must have positive size, got {self.width}x{self.height}"
            )

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.width and self.y <= py < self.y + self.height

    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)


@dataclass(frozen=True, slots=True)
class RegionConfig:
    """Static bounding boxes marked by the user at the start of a session."""

    target_activity_space: Rect
    facilitator: Rect
    subject: Rect
    frame_width: int
    frame_height: int

    def __post_init__(self):
        if self.frame_width <= 0 or self.frame_height <= 0:
            raise InvalidModelError(
                f"frame must have positive size, got {self.frame_width}x{self.frame_height}"
            )
        for name in ("target_activity_space", "facilitator", "subject"):
            rect: Rect = getattr(self, name)
            if (
                rect.x < 0
                or rect.y < 0
                or rect.x + rect.width > self.frame_width
                or rect.y + rect.height > self.frame_height
            ):
                raise InvalidModelError(
                    f"region '{name}' {rect} exceeds frame bounds "
                    f"{self.frame_width}x{self.frame_height}"
                )


@dataclass(frozen=True, slots=True)
class ObservationWindow:
    """A frame range [start_frame, end_frame) observed as one unit."""

    start_frame: int
    end_frame: int
    duration_s: float
    partial: bool = False

    def __post_init__(self):
        if self.end_frame <= self.start_frame:
            raise InvalidModelError(
                f"window end {self.end_frame} must exceed start {self.start_frame}"
            )
        if self.duration_s <= 0:
            raise InvalidModelError(f"window duration must be positive, got {self.duration_s}")

    def n_frames(self) -> int:
        return self.end_frame - self.start_frame


@dataclass(frozen=True, slots=True)
class Episode:
    """A maximal run of consecutive detected frames with one gaze entity."""

    entity: GazeEntity
    start_frame: int
    end_frame: int
    duration_s: float

    def __post_init__(self):
        if self.entity is GazeEntity.UNDETECTED:
            raise InvalidModelError("episodes never carry the UNDETECTED label")
        if self.end_frame <= self.start_frame:
            raise InvalidModelError(
                f"episode end {self.end_frame} must exceed start {self.start_frame}"
            )
        if self.duration_s <= 0:
            raise InvalidModelError("episode duration must be positive")

    def n_frames(self) -> int:
        return self.end_frame - self.start_frame


# Canonical order of the 21 attention features. Proportions first, then
# episode-duration statistics, then the six entity-to-entity transition
# probabilities, then the six flux marginals.
ATTENTION_FEATURE_NAMES: tuple[str, ...] = (
    "prop_tablet",
    "prop_facilitator",
    "prop_elsewhere",
    "ep_mean_tablet",
    "ep_std_tablet",
    "ep_mean_facilitator",
    "ep_std_facilitator",
    "ep_mean_elsewhere",
    "ep_std_elsewhere",
    "trans_tablet_facilitator",
    "trans_tablet_elsewhere",
    "trans_facilitator_tablet",
    "trans_facilitator_elsewhere",
    "trans_elsewhere_tablet",
    "trans_elsewhere_facilitator",
    "flux_in_tablet",
    "flux_out_tablet",
    "flux_in_facilitator",
    "flux_out_facilitator",
    "flux_in_elsewhere",
    "flux_out_elsewhere",
)

_PROP_SUM_TOL = 1e-9
_TRANS_SUM_TOL = 1e-12


def _transition_field(a: GazeEntity, b: GazeEntity) -> str:
    return f"trans_{a.value}_{b.value}"


@dataclass(frozen=True, slots=True)
class AttentionFeatures:
    """The 21 gaze-derived attention features for one observation window.

    Transition probabilities are joint (normalized by the total number of
    episode transitions in the window), so the six of them sum to 1
    whenever at least one transition exists, and each flux marginal is the
    plain sum of its two transition terms.
    """

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
    ep_count_tablet: int = 0
    ep_count_facilitator: int = 0
    ep_count_elsewhere: int = 0

    def __post_init__(self):
        for name in ATTENTION_FEATURE_NAMES:
            value = getattr(self, name)
            if name.startswith(("prop_", "trans_", "flux_")):
                if not 0.0 <= value <= 1.0:
                    raise InvalidModelError(f"{name}={value} outside [0, 1]")
            elif value < 0.0:
                raise InvalidModelError(f"{name}={value} must be non-negative")
        if not 0.0 <= self.detected_coverage <= 1.0:
            raise InvalidModelError(
                f"detected_coverage={self.detected_coverage} outside [0, 1]"
            )
        if self.detected_coverage > 0.0:
            prop_sum = self.prop_tablet + self.prop_facilitator + self.prop_elsewhere
            if abs(prop_sum - 1.0) > _PROP_SUM_TOL:
                raise InvalidModelError(f"gaze proportions sum to {prop_sum}, not 1")
        trans_sum = self.transition_sum()
        if trans_sum != 0.0 and abs(trans_sum - 1.0) > _TRANS_SUM_TOL:
            raise InvalidModelError(
                f"transition probabilities sum to {trans_sum}, not 0 or 1"
            )
        for entity in ANALYTICS_ENTITIES:
            if getattr(self, f"flux_in_{entity.value}") != self._flux_in_sum(entity):
                raise InvalidModelError(f"flux_in_{entity.value} != sum of inbound transitions")
            if getattr(self, f"flux_out_{entity.value}") != self._flux_out_sum(entity):
                raise InvalidModelError(f"flux_out_{entity.value} != sum of outbound transitions")

    def _flux_in_sum(self, entity: GazeEntity) -> float:
        total = 0.0
        for other in ANALYTICS_ENTITIES:
            if other is not entity:
                total += getattr(self, _transition_field(other, entity))
        return total

    def _flux_out_sum(self, entity: GazeEntity) -> float:
        total = 0.0
        for other in ANALYTICS_ENTITIES:
            if other is not entity:
                total += getattr(self, _transition_field(entity, other))
        return total

    def transition(self, a: GazeEntity, b: GazeEntity) -> float:
        return getattr(self, _transition_field(a, b))

    def transition_sum(self) -> float:
        return sum(getattr(self, _transition_field(a, b)) for a, b in TRANSITION_PAIRS)

    def as_vector(self) -> list[float]:
        """The 21 features in canonical ATTENTION_FEATURE_NAMES order."""
        return [getattr(self, name) for name in ATTENTION_FEATURE_NAMES]

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in ATTENTION_FEATURE_NAMES}


@dataclass(frozen=True, slots=True)
class AttitudeFeatures:
    """Positive/negative affect proportions for one observation window."""

    prop_positive: float
    prop_negative: float
    detected_coverage: float

    def __post_init__(self):
        for name in ("prop_positive", "prop_negative", "detected_coverage"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidModelError(f"{name}={value} outside [0, 1]")
        # FEAR/SURPRISE frames belong to neither bucket, so the sum may be < 1.
        if self.prop_positive + self.prop_negative > 1.0 + _PROP_SUM_TOL:
            raise InvalidModelError("affect proportions exceed 1")


@dataclass(frozen=True, slots=True)
class MpesWindowScore:
    """Expert ordinal scores for one observed window: active/passive/other."""

    window_index: int
    active: int
    passive: int
    other: int

    def __post_init__(self):
        if self.window_index < 0:
            raise InvalidModelError(f"window_index must be >= 0, got {self.window_index}")
        for name in ("active", "passive", "other"):
            value = getattr(self, name)
            if value not in (0, 1, 2):
                raise InvalidModelError(f"MPES {name}={value} outside {{0, 1, 2}}")

    def value_for(self, item: str) -> int:
        if item not in ("active", "passive", "other"):
            raise InvalidModelError(f"unknown MPES item {item!r}")
        return getattr(self, item)


MPES_ITEMS = ("active", "passive", "other")


@dataclass(frozen=True, slots=True)
class OmePeriod:
    """One expert-marked engagement period with 7-point ratings."""

    start_s: float
    end_s: float
    attention: int
    attitude: int

    def __post_init__(self):
        if self.start_s < 0 or self.end_s <= self.start_s:
            raise InvalidModelError(
                f"period [{self.start_s}, {self.end_s}) is not a forward time range"
            )
        for name in ("attention", "attitude"):
            value = getattr(self, name)
            if not 1 <= value <= 7:
                raise InvalidModelError(f"OME {name}={value} outside 1..7")


@dataclass(frozen=True)
class BosAnnotation:
    """Expert behavioral-observation scores for one session.

    ``scale`` selects which payload is populated: MPES carries per-window
    ordinal triples, OME carries non-overlapping engagement periods.
    """

    scale: str
    mpes: tuple[MpesWindowScore, ...] = ()
    ome: tuple[OmePeriod, ...] = ()

    def __post_init__(self):
        if self.scale not in ("MPES", "OME"):
            raise InvalidModelError(f"scale must be MPES or OME, got {self.scale!r}")
        object.__setattr__(self, "mpes", tuple(self.mpes))
        object.__setattr__(self, "ome", tuple(self.ome))
        if self.scale == "MPES":
            if self.ome:
                raise InvalidModelError("MPES annotation must not carry OME periods")
            if not self.mpes:
                raise InvalidModelError("MPES annotation has no window scores")
        else:
            if self.mpes:
                raise InvalidModelError("OME annotation must not carry MPES scores")
            if not self.ome:
                raise InvalidModelError("OME annotation has no engagement periods")
            ordered = sorted(self.ome, key=lambda p: p.start_s)
            for prev, cur in zip(ordered, ordered[1:]):
                if cur.start_s < prev.end_s:
                    raise InvalidModelError(
                        f"OME periods [{prev.start_s}, {prev.end_s}) and "
                        f"[{cur.start_s}, {cur.end_s}) overlap"
                    )
            object.__setattr__(self, "ome", tuple(ordered))


@dataclass(frozen=True, slots=True)
class GazePointRecord:
    """The upstream gaze regressor's per-frame point output for one subject.

    Coordinates are present iff ``detected``; undetected frames carry None.
    """

    frame_index: int
    subject_id: str
    gaze_x: float | None
    gaze_y: float | None
    detected: bool

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvalidModelError(f"frame_index must be >= 0, got {self.frame_index}")
        if self.subject_id not in VALID_SUBJECTS:
            raise InvalidModelError(
                f"subject_id must be one of {VALID_SUBJECTS}, got {self.subject_id!r}"
            )
        if self.detected:
            if self.gaze_x is None or self.gaze_y is None:
                raise InvalidModelError("detected gaze point must carry coordinates")
            if not (math.isfinite(self.gaze_x) and math.isfinite(self.gaze_y)):
                raise InvalidModelError("gaze coordinates must be finite")
        elif self.gaze_x is not None or self.gaze_y is not None:
            raise InvalidModelError("undetected gaze point must not carry coordinates")
