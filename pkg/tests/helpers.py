"""Shared builders for tests: compact label notation and scenario generators."""

from __future__ import annotations

from aveid.model import (
    EmotionLabel,
    FrameRecord,
    GazeEntity,
    LabelStream,
    Rect,
    RegionConfig,
)
from aveid.synth import Xorshift64Star

_GAZE_CODES = {
    "T": GazeEntity.TABLET,
    "F": GazeEntity.FACILITATOR,
    "E": GazeEntity.ELSEWHERE,
    "U": GazeEntity.UNDETECTED,
}

_EMOTION_CODES = {
    "a": EmotionLabel.ANGER,
    "d": EmotionLabel.DISGUST,
    "f": EmotionLabel.FEAR,
    "h": EmotionLabel.HAPPINESS,
    "s": EmotionLabel.SADNESS,
    "r": EmotionLabel.SURPRISE,
    "n": EmotionLabel.NEUTRAL,
    "u": EmotionLabel.UNDETECTED,
}


def gaze(text: str) -> list[GazeEntity]:
    """'TTFE U' -> gaze labels (spaces ignored)."""
    return [_GAZE_CODES[c] for c in text if c != " "]


def emotions(text: str) -> list[EmotionLabel]:
    return [_EMOTION_CODES[c] for c in text if c != " "]


def stream_from_gaze(
    text_or_labels,
    fps: float = 1.0,
    session_id: str = "test",
    emotion: EmotionLabel = EmotionLabel.NEUTRAL,
) -> LabelStream:
    labels = gaze(text_or_labels) if isinstance(text_or_labels, str) else text_or_labels
    records = tuple(
        FrameRecord(
            frame_index=i,
            gaze=lab,
            emotion=EmotionLabel.UNDETECTED if lab is GazeEntity.UNDETECTED else emotion,
        )
        for i, lab in enumerate(labels)
    )
    return LabelStream(session_id=session_id, fps=fps, records=records)


def standard_regions() -> RegionConfig:
    return RegionConfig(
        target_activity_space=Rect(100, 400, 300, 200),
        facilitator=Rect(700, 100, 250, 300),
        subject=Rect(400, 100, 250, 300),
        frame_width=1280,
        frame_height=720,
    )


def iid_gaze_labels(
    rng: Xorshift64Star, n: int, p_tablet: float, p_facilitator: float
) -> list[GazeEntity]:
    """Per-frame iid gaze draws with the given tablet/facilitator mass."""
    labels = []
    for _ in range(n):
        u = rng.next_float()
        if u < p_tablet:
            labels.append(GazeEntity.TABLET)
        elif u < p_tablet + p_facilitator:
            labels.append(GazeEntity.FACILITATOR)
        else:
            labels.append(GazeEntity.ELSEWHERE)
    return labels


def random_row(rng: Xorshift64Star, floor: float = 0.02) -> tuple[float, float, float]:
    """A random stochastic row with all entries at least ``floor``."""
    raw = [floor + rng.next_float() for _ in range(3)]
    total = sum(raw)
    return tuple(v / total for v in raw)
