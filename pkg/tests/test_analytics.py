import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aveid.analytics import (
    attention_features,
    attention_features_for_labels,
    attitude_features,
    complement_periods,
    period_features,
    segment_episodes,
    window_features,
    windowize,
)
from aveid.errors import EmptyWindowError, InvalidModelError, PeriodOutOfRangeError
from aveid.model import (
    ATTENTION_FEATURE_NAMES,
    EmotionLabel,
    GazeEntity,
    ObservationWindow,
)
from aveid.synth import Xorshift64Star

from helpers import emotions, gaze, iid_gaze_labels, stream_from_gaze
from oracles import brute_force_attention

T, F, E, U = GazeEntity.TABLET, GazeEntity.FACILITATOR, GazeEntity.ELSEWHERE, GazeEntity.UNDETECTED

gaze_label_lists = st.lists(st.sampled_from([T, F, E, U]), min_size=1, max_size=120)


def window_for(labels, fps=1.0):
    return ObservationWindow(0, len(labels), len(labels) / fps)


# --- segmentation -------------------------------------------------------

def test_segment_worked_example():
    eps = segment_episodes(gaze("TTFFTE"), fps=1.0)
    assert [(e.entity, e.duration_s) for e in eps] == [
        (T, 2.0), (F, 2.0), (T, 1.0), (E, 1.0),
    ]


def test_segment_single_entity():
    eps = segment_episodes([T] * 10, fps=2.0)
    assert len(eps) == 1
    assert eps[0].duration_s == 5.0


def test_segment_undetected_splits_episodes():
    eps = segment_episodes(gaze("TTUUTT"), fps=1.0)
    assert [(e.entity, e.start_frame, e.end_frame) for e in eps] == [
        (T, 0, 2), (T, 4, 6),
    ]


def test_segment_concatenation_property():
    left = gaze("TTFE")
    right = gaze("EFT")
    combined = segment_episodes(left + [U] + right, fps=1.0)
    expected = segment_episodes(left, fps=1.0) + segment_episodes(
        right, fps=1.0, start_frame=len(left) + 1
    )
    assert combined == expected


def test_segment_min_episode_merges_into_preceding():
    # the 1-frame facilitator run merges into the preceding tablet episode
    eps = segment_episodes(gaze("TTFTT"), fps=1.0, min_episode_frames=2)
    assert [(e.entity, e.n_frames()) for e in eps] == [(T, 5)]


def test_segment_min_episode_leading_run_carries_forward():
    eps = segment_episodes(gaze("FTTTT"), fps=1.0, min_episode_frames=2)
    assert [(e.entity, e.n_frames()) for e in eps] == [(T, 5)]


def test_segment_min_episode_isolated_short_run_kept():
    eps = segment_episodes(gaze("T"), fps=1.0, min_episode_frames=5)
    assert [(e.entity, e.n_frames()) for e in eps] == [(T, 1)]


def test_segment_gap_bridging():
    labels = gaze("TTUTT")
    assert len(segment_episodes(labels, fps=1.0)) == 2
    bridged = segment_episodes(labels, fps=1.0, max_gap_frames=1)
    assert [(e.entity, e.n_frames()) for e in bridged] == [(T, 5)]
    # different flanks never bridge
    assert len(segment_episodes(gaze("TTUFF"), fps=1.0, max_gap_frames=1)) == 2


@given(gaze_label_lists)
@settings(max_examples=200)
def test_segment_tiles_detected_frames(labels):
    eps = segment_episodes(labels, fps=1.0)
    covered = set()
    for ep in eps:
        covered.update(range(ep.start_frame, ep.end_frame))
    detected = {i for i, lab in enumerate(labels) if lab is not U}
    assert covered == detected
    for prev, cur in zip(eps, eps[1:]):
        if prev.end_frame == cur.start_frame:
            assert prev.entity is not cur.entity


# --- attention features --------------------------------------------------

def test_attention_worked_example():
    labels = gaze("TTFFTE")
    feats = attention_features_for_labels(labels, window_for(labels), fps=1.0)
    assert feats.prop_tablet == pytest.approx(0.5)
    assert feats.prop_facilitator == pytest.approx(1 / 3)
    assert feats.prop_elsewhere == pytest.approx(1 / 6)
    third = 1 / 3
    assert feats.trans_tablet_facilitator == pytest.approx(third)
    assert feats.trans_facilitator_tablet == pytest.approx(third)
    assert feats.trans_tablet_elsewhere == pytest.approx(third)
    assert feats.trans_facilitator_elsewhere == 0.0
    assert feats.trans_elsewhere_tablet == 0.0
    assert feats.trans_elsewhere_facilitator == 0.0
    assert feats.flux_in_tablet == pytest.approx(third)
    assert feats.flux_out_tablet == pytest.approx(2 / 3)
    assert feats.ep_mean_tablet == 1.5
    assert feats.ep_std_tablet == 0.5
    assert feats.detected_coverage == 1.0


def test_attention_single_entity_window():
    labels = [T] * 8
    feats = attention_features_for_labels(labels, window_for(labels), fps=1.0)
    assert feats.prop_tablet == 1.0
    assert feats.transition_sum() == 0.0
    assert feats.flux_in_tablet == 0.0 and feats.flux_out_tablet == 0.0
    assert feats.ep_std_tablet == 0.0
    assert feats.ep_count_tablet == 1


def test_attention_empty_window_is_an_error():
    labels = [U, U, U]
    with pytest.raises(EmptyWindowError):
        attention_features_for_labels(labels, window_for(labels), fps=1.0)


def test_attention_rejects_episode_outside_window():
    eps = segment_episodes([T, T, T, T], fps=1.0)
    with pytest.raises(InvalidModelError):
        attention_features(eps, ObservationWindow(0, 2, 2.0), fps=1.0)


def test_no_transition_across_undetected_gap():
    # the T->F change straddles a gap: no transition is counted
    labels = gaze("TTUFF")
    feats = attention_features_for_labels(labels, window_for(labels), fps=1.0)
    assert feats.transition_sum() == 0.0


@given(gaze_label_lists)
@settings(max_examples=300)
def test_flux_identity_and_normalization(labels):
    window = window_for(labels)
    try:
        feats = attention_features_for_labels(labels, window, fps=1.0)
    except EmptyWindowError:
        assert all(lab is U for lab in labels)
        return
    assert feats.prop_tablet + feats.prop_facilitator + feats.prop_elsewhere == pytest.approx(
        1.0, abs=1e-9
    )
    s = feats.transition_sum()
    assert s == 0.0 or abs(s - 1.0) <= 1e-12
    # flux identity, exact (pinned summation order)
    assert feats.flux_in_tablet == feats.trans_facilitator_tablet + feats.trans_elsewhere_tablet
    assert feats.flux_out_tablet == feats.trans_tablet_facilitator + feats.trans_tablet_elsewhere
    total_in = feats.flux_in_tablet + feats.flux_in_facilitator + feats.flux_in_elsewhere
    total_out = feats.flux_out_tablet + feats.flux_out_facilitator + feats.flux_out_elsewhere
    assert total_in == pytest.approx(s, abs=1e-12)
    assert total_out == pytest.approx(s, abs=1e-12)
    # episode counts times mean duration recover the detected frame count
    detected = sum(1 for lab in labels if lab is not U)
    recovered = (
        feats.ep_count_tablet * feats.ep_mean_tablet
        + feats.ep_count_facilitator * feats.ep_mean_facilitator
        + feats.ep_count_elsewhere * feats.ep_mean_elsewhere
    ) * 1.0
    assert recovered == pytest.approx(detected, rel=1e-9)


@given(gaze_label_lists)
@settings(max_examples=200)
def test_features_match_brute_force(labels):
    window = window_for(labels)
    expected = brute_force_attention(labels, fps=1.0)
    if expected is None:
        with pytest.raises(EmptyWindowError):
            attention_features_for_labels(labels, window, fps=1.0)
        return
    feats = attention_features_for_labels(labels, window, fps=1.0)
    for name in ATTENTION_FEATURE_NAMES:
        assert getattr(feats, name) == pytest.approx(expected[name], abs=1e-12), name
    assert feats.detected_coverage == pytest.approx(expected["detected_coverage"], abs=1e-12)


# --- attitude features ---------------------------------------------------

def test_attitude_all_neutral():
    labels = [EmotionLabel.NEUTRAL] * 5
    feats = attitude_features(labels, ObservationWindow(0, 5, 5.0))
    assert feats.prop_positive == 1.0
    assert feats.prop_negative == 0.0


def test_attitude_worked_example():
    labels = emotions("hsfn")  # happiness, sadness, fear, neutral
    feats = attitude_features(labels, ObservationWindow(0, 4, 4.0))
    assert feats.prop_positive == 0.5
    assert feats.prop_negative == 0.25


def test_attitude_undetected_only_flags_empty():
    labels = [EmotionLabel.UNDETECTED] * 4
    with pytest.raises(EmptyWindowError):
        attitude_features(labels, ObservationWindow(0, 4, 4.0))


def test_attitude_undetected_excluded_from_denominator():
    labels = emotions("huu n")
    feats = attitude_features(labels, ObservationWindow(0, 4, 4.0))
    assert feats.prop_positive == 1.0
    assert feats.detected_coverage == 0.5


def test_attitude_custom_buckets():
    labels = emotions("ff")
    feats = attitude_features(
        labels,
        ObservationWindow(0, 2, 2.0),
        positive=frozenset({EmotionLabel.FEAR}),
        negative=frozenset(),
    )
    assert feats.prop_positive == 1.0


# --- windowing -----------------------------------------------------------

def test_windowize_exact_division():
    stream = stream_from_gaze([T] * 600, fps=1.0)
    windows = windowize(stream, 300.0)
    assert len(windows) == 2
    assert all(not w.partial for w in windows)
    assert windows[1].start_frame == 300 and windows[1].end_frame == 600


def test_windowize_emits_large_tail_as_partial():
    stream = stream_from_gaze([T] * 760, fps=1.0)
    windows = windowize(stream, 300.0)
    assert len(windows) == 3
    assert windows[2].partial
    assert windows[2].n_frames() == 160
    assert windows[2].duration_s == 160.0


def test_windowize_drops_small_tail():
    stream = stream_from_gaze([T] * 720, fps=1.0)
    windows = windowize(stream, 300.0)
    assert len(windows) == 2


def test_windowize_rejects_nonpositive_window():
    stream = stream_from_gaze([T] * 10, fps=1.0)
    with pytest.raises(InvalidModelError):
        windowize(stream, 0.0)


def test_window_features_undefined_window_is_flagged_not_zeroed():
    stream = stream_from_gaze("TTTT UUUU TTTT".replace(" ", ""), fps=1.0)
    rows = window_features(stream, 4.0)
    assert rows[0].attention is not None
    assert rows[1].attention is None
    assert rows[1].attitude is None
    assert rows[2].attention is not None


# --- period features ------------------------------------------------------

def test_period_whole_stream_equals_stream_features():
    rng = Xorshift64Star(11)
    labels = iid_gaze_labels(rng, 200, 0.6, 0.25)
    stream = stream_from_gaze(labels, fps=4.0)
    whole = period_features(stream, [(0.0, 50.0)])[0]
    direct = attention_features_for_labels(
        labels, ObservationWindow(0, 200, 50.0), fps=4.0
    )
    assert whole == direct


def test_period_features_match_slice_recompute():
    rng = Xorshift64Star(23)
    labels = iid_gaze_labels(rng, 300, 0.5, 0.3)
    stream = stream_from_gaze(labels, fps=2.0)
    periods = [(0.0, 40.0), (60.0, 110.0), (120.0, 150.0)]
    results = period_features(stream, periods)
    for (start_s, end_s), feats in zip(periods, results):
        lo, hi = int(start_s * 2), int(end_s * 2)
        sliced = labels[lo:hi]
        window = ObservationWindow(lo, hi, (hi - lo) / 2.0)
        assert feats == attention_features_for_labels(sliced, window, fps=2.0)


def test_period_out_of_range():
    stream = stream_from_gaze([T] * 100, fps=1.0)
    with pytest.raises(PeriodOutOfRangeError):
        period_features(stream, [(50.0, 150.0)])


def test_complement_periods():
    assert complement_periods([(10.0, 20.0), (40.0, 50.0)], 60.0) == [
        (0.0, 10.0), (20.0, 40.0), (50.0, 60.0),
    ]
    assert complement_periods([(0.0, 60.0)], 60.0) == []


def test_period_complement_features():
    labels = [T] * 50 + [E] * 50
    stream = stream_from_gaze(labels, fps=1.0)
    engaged = period_features(stream, [(0.0, 50.0)])
    not_engaged = period_features(stream, [(0.0, 50.0)], complement=True)
    assert engaged[0].prop_tablet == 1.0
    assert not_engaged[0].prop_tablet == 0.0
