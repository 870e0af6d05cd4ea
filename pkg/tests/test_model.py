import pytest

from aveid.errors import InvalidModelError
from aveid.model import (
    ANALYTICS_ENTITIES,
    ATTENTION_FEATURE_NAMES,
    TRANSITION_PAIRS,
    AttentionFeatures,
    AttitudeFeatures,
    BosAnnotation,
    EmotionLabel,
    Episode,
    FrameRecord,
    GazeEntity,
    GazePointRecord,
    LabelStream,
    MpesWindowScore,
    ObservationWindow,
    OmePeriod,
    Rect,
    RegionConfig,
)

from helpers import stream_from_gaze


def test_entity_alphabet():
    assert len(GazeEntity) == 4
    assert GazeEntity.UNDETECTED not in ANALYTICS_ENTITIES
    assert len(ANALYTICS_ENTITIES) == 3
    assert len(TRANSITION_PAIRS) == 6
    assert all(a is not b for a, b in TRANSITION_PAIRS)


def test_emotion_alphabet():
    assert len(EmotionLabel) == 8
    for token in ("anger", "disgust", "fear", "happiness", "sadness", "surprise", "neutral"):
        assert EmotionLabel(token).value == token


def test_exactly_21_attention_features():
    assert len(ATTENTION_FEATURE_NAMES) == 21
    # 3 proportions + 6 episode stats + 6 transitions + 6 flux marginals
    assert sum(n.startswith("prop_") for n in ATTENTION_FEATURE_NAMES) == 3
    assert sum(n.startswith("ep_") for n in ATTENTION_FEATURE_NAMES) == 6
    assert sum(n.startswith("trans_") for n in ATTENTION_FEATURE_NAMES) == 6
    assert sum(n.startswith("flux_") for n in ATTENTION_FEATURE_NAMES) == 6


def test_frame_record_validation():
    with pytest.raises(InvalidModelError):
        FrameRecord(frame_index=-1, gaze=GazeEntity.TABLET, emotion=EmotionLabel.NEUTRAL)
    with pytest.raises(InvalidModelError):
        FrameRecord(
            frame_index=0,
            gaze=GazeEntity.TABLET,
            emotion=EmotionLabel.NEUTRAL,
            subject_id="nurse",
        )


def test_label_stream_rejects_duplicates_and_disorder():
    rec = lambda i: FrameRecord(frame_index=i, gaze=GazeEntity.TABLET, emotion=EmotionLabel.NEUTRAL)
    with pytest.raises(InvalidModelError):
        LabelStream(session_id="s", fps=25.0, records=(rec(0), rec(0)))
    with pytest.raises(InvalidModelError):
        LabelStream(session_id="s", fps=25.0, records=())
    with pytest.raises(InvalidModelError):
        LabelStream(session_id="s", fps=0.0, records=(rec(0),))


def test_label_stream_span_and_labels():
    stream = stream_from_gaze("TTFE")
    assert stream.n_frames() == 4
    assert stream.duration_s() == 4.0
    assert [l.value for l in stream.gaze_labels()] == [
        "tablet", "tablet", "facilitator", "elsewhere",
    ]


def test_label_stream_fills_gaps_with_undetected():
    records = (
        FrameRecord(frame_index=0, gaze=GazeEntity.TABLET, emotion=EmotionLabel.NEUTRAL),
        FrameRecord(frame_index=2, gaze=GazeEntity.TABLET, emotion=EmotionLabel.NEUTRAL),
    )
    stream = LabelStream(session_id="s", fps=1.0, records=records)
    assert stream.gaze_labels()[1] is GazeEntity.UNDETECTED
    assert stream.emotion_labels()[1] is EmotionLabel.UNDETECTED


def test_rect_and_region_bounds():
    with pytest.raises(InvalidModelError):
        Rect(0, 0, -5, 10)
    rect = Rect(10, 10, 20, 20)
    assert rect.contains(10, 10)           # closed low edge
    assert not rect.contains(30, 30)       # open high edge
    with pytest.raises(InvalidModelError):
        RegionConfig(
            target_activity_space=Rect(0, 0, 2000, 100),
            facilitator=Rect(0, 0, 10, 10),
            subject=Rect(0, 0, 10, 10),
            frame_width=1280,
            frame_height=720,
        )


def test_window_and_episode_invariants():
    with pytest.raises(InvalidModelError):
        ObservationWindow(start_frame=5, end_frame=5, duration_s=1.0)
    with pytest.raises(InvalidModelError):
        Episode(entity=GazeEntity.UNDETECTED, start_frame=0, end_frame=2, duration_s=2.0)


def _features_kwargs(**overrides):
    base = {name: 0.0 for name in ATTENTION_FEATURE_NAMES}
    base.update(prop_tablet=1.0, detected_coverage=1.0)
    base.update(overrides)
    return base


def test_attention_features_validation():
    f = AttentionFeatures(**_features_kwargs())
    assert f.as_vector() == [1.0] + [0.0] * 20
    assert list(f.to_dict()) == list(ATTENTION_FEATURE_NAMES)
    with pytest.raises(InvalidModelError):
        AttentionFeatures(**_features_kwargs(prop_tablet=0.5))  # proportions no longer sum to 1
    with pytest.raises(InvalidModelError):
        AttentionFeatures(**_features_kwargs(trans_tablet_facilitator=0.5))  # flux identity broken
    with pytest.raises(InvalidModelError):
        AttentionFeatures(**_features_kwargs(prop_tablet=1.5))


def test_attention_features_accepts_consistent_transitions():
    f = AttentionFeatures(
        **_features_kwargs(
            trans_tablet_facilitator=0.5,
            trans_facilitator_tablet=0.5,
            flux_in_tablet=0.5,
            flux_out_tablet=0.5,
            flux_in_facilitator=0.5,
            flux_out_facilitator=0.5,
        )
    )
    assert f.transition_sum() == 1.0
    assert f.transition(GazeEntity.TABLET, GazeEntity.FACILITATOR) == 0.5


def test_attitude_features_validation():
    AttitudeFeatures(prop_positive=0.5, prop_negative=0.25, detected_coverage=1.0)
    with pytest.raises(InvalidModelError):
        AttitudeFeatures(prop_positive=0.8, prop_negative=0.4, detected_coverage=1.0)
    with pytest.raises(InvalidModelError):
        AttitudeFeatures(prop_positive=-0.1, prop_negative=0.0, detected_coverage=1.0)


def test_mpes_score_range():
    MpesWindowScore(window_index=0, active=2, passive=1, other=0)
    with pytest.raises(InvalidModelError):
        MpesWindowScore(window_index=0, active=3, passive=0, other=0)


def test_ome_period_validation():
    OmePeriod(start_s=30.0, end_s=210.0, attention=5, attitude=6)
    with pytest.raises(InvalidModelError):
        OmePeriod(start_s=10.0, end_s=5.0, attention=5, attitude=6)
    with pytest.raises(InvalidModelError):
        OmePeriod(start_s=0.0, end_s=10.0, attention=0, attitude=6)


def test_bos_annotation_overlap_and_scale():
    p1 = OmePeriod(start_s=0.0, end_s=10.0, attention=5, attitude=5)
    p2 = OmePeriod(start_s=5.0, end_s=15.0, attention=5, attitude=5)
    with pytest.raises(InvalidModelError):
        BosAnnotation(scale="OME", ome=(p1, p2))
    with pytest.raises(InvalidModelError):
        BosAnnotation(scale="NOPE", ome=(p1,))
    with pytest.raises(InvalidModelError):
        BosAnnotation(scale="MPES")
    # periods come back sorted by start
    p3 = OmePeriod(start_s=20.0, end_s=30.0, attention=5, attitude=5)
    ann = BosAnnotation(scale="OME", ome=(p3, p1))
    assert ann.ome[0].start_s == 0.0


def test_gaze_point_coordinate_contract():
    GazePointRecord(frame_index=0, subject_id="pwd", gaze_x=1.0, gaze_y=2.0, detected=True)
    GazePointRecord(frame_index=0, subject_id="pwd", gaze_x=None, gaze_y=None, detected=False)
    with pytest.raises(InvalidModelError):
        GazePointRecord(frame_index=0, subject_id="pwd", gaze_x=None, gaze_y=None, detected=True)
    with pytest.raises(InvalidModelError):
        GazePointRecord(frame_index=0, subject_id="pwd", gaze_x=1.0, gaze_y=None, detected=False)
