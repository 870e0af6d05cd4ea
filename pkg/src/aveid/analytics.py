"""Episode segmentation and per-window attention/attitude features.

The analytics pipeline is: per-frame gaze labels -> episodes of sustained
focus -> 21 attention features per observation window. Undetected frames
are excluded from every denominator (detector failure is not behavior) and
are reported via ``detected_coverage``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Sequence

from .errors import (
    EmptyWindowError,
    InvalidModelError,
    PeriodOutOfRangeError,
)
from .model import (
    ANALYTICS_ENTITIES,
    NEGATIVE_EMOTIONS,
    POSITIVE_EMOTIONS,
    SUBJECT_PWD,
    AttentionFeatures,
    AttitudeFeatures,
    EmotionLabel,
    Episode,
    GazeEntity,
    LabelStream,
    ObservationWindow,
)

_UNDETECTED = GazeEntity.UNDETECTED


def _merge_short_runs(
    runs: list[tuple[GazeEntity, int]], min_frames: int
) -> list[tuple[GazeEntity, int]]:
    """Merge runs shorter than ``min_frames`` within one gap-free block.

    A short run is absorbed by the preceding episode when one exists;
    otherwise its frames are carried forward into the following run. A
    block whose runs are all short collapses into a single episode labeled
    by its final run. Same-entity neighbours produced by merging coalesce.
    """
    merged: list[tuple[GazeEntity, int]] = []
    carried = 0
    for i, (entity, length) in enumerate(runs):
        length += carried
        carried = 0
        last = i == len(runs) - 1
        if length < min_frames and (merged or not last):
            if merged:
                prev_entity, prev_len = merged[-1]
                merged[-1] = (prev_entity, prev_len + length)
            else:
                carried = length
            continue
        if merged and merged[-1][0] is entity:
            merged[-1] = (entity, merged[-1][1] + length)
        else:
            merged.append((entity, length))
    return merged


def segment_episodes(
    labels: Sequence[GazeEntity],
    fps: float,
    min_episode_frames: int = 0,
    *,
    max_gap_frames: int = 0,
    start_frame: int = 0,
) -> list[Episode]:
    """Run-length encode gaze labels into episodes of sustained focus.

    Undetected runs split episodes rather than bridging them, except runs
    of at most ``max_gap_frames`` flanked by the same entity on both sides,
    which are filled with that entity (default 0: no bridging). Runs
    shorter than ``min_episode_frames`` merge into the preceding episode
    (see _merge_short_runs for block edges; default 0: no merging).
    """
    if fps <= 0:
        raise InvalidModelError(f"fps must be positive, got {fps}")
    runs = [(entity, len(list(group))) for entity, group in groupby(labels)]

    if max_gap_frames > 0:
        bridged: list[tuple[GazeEntity, int]] = []
        i = 0
        while i < len(runs):
            entity, length = runs[i]
            if (
                entity is _UNDETECTED
                and length <= max_gap_frames
                and bridged
                and i + 1 < len(runs)
                and bridged[-1][0] is runs[i + 1][0]
                and runs[i + 1][0] is not _UNDETECTED
            ):
                prev_entity, prev_len = bridged[-1]
                bridged[-1] = (prev_entity, prev_len + length + runs[i + 1][1])
                i += 2
                continue
            if bridged and bridged[-1][0] is entity:
                prev_entity, prev_len = bridged[-1]
                bridged[-1] = (prev_entity, prev_len + length)
            else:
                bridged.append((entity, length))
            i += 1
        runs = bridged

    episodes: list[Episode] = []
    frame = start_frame
    block: list[tuple[GazeEntity, int]] = []
    block_start = start_frame

    def flush_block() -> None:
        nonlocal block
        if not block:
            return
        out = _merge_short_runs(block, min_episode_frames) if min_episode_frames > 1 else block
        pos = block_start
        for entity, length in out:
            episodes.append(
                Episode(
                    entity=entity,
                    start_frame=pos,
                    end_frame=pos + length,
                    duration_s=length / fps,
                )
            )
            pos += length
        block = []

    for entity, length in runs:
        if entity is _UNDETECTED:
            flush_block()
        else:
            if not block:
                block_start = frame
            block.append((entity, length))
        frame += length
    flush_block()
    return episodes


def attention_features(
    episodes: Sequence[Episode],
    window: ObservationWindow,
    fps: float,
) -> AttentionFeatures:
    """Compute the 21 attention features from a window's episodes.

    Transitions are counted between gap-free adjacent episode pairs and
    normalized by the total pair count (joint probabilities), so the six
    transition features sum to 1 whenever any transition exists and each
    flux marginal is the exact sum of its two transition terms.
    """
    if fps <= 0:
        raise InvalidModelError(f"fps must be positive, got {fps}")
    if not episodes:
        raise EmptyWindowError(
            f"window [{window.start_frame}, {window.end_frame}) has no detected frames"
        )
    for ep in episodes:
        if ep.start_frame < window.start_frame or ep.end_frame > window.end_frame:
            raise InvalidModelError(
                f"episode [{ep.start_frame}, {ep.end_frame}) outside window "
                f"[{window.start_frame}, {window.end_frame})"
            )

    frames: dict[GazeEntity, int] = {e: 0 for e in ANALYTICS_ENTITIES}
    durations: dict[GazeEntity, list[float]] = {e: [] for e in ANALYTICS_ENTITIES}
    for ep in episodes:
        frames[ep.entity] += ep.n_frames()
        durations[ep.entity].append(ep.duration_s)
    detected = sum(frames.values())

    trans_counts: dict[tuple[GazeEntity, GazeEntity], int] = {}
    total_pairs = 0
    for prev, cur in zip(episodes, episodes[1:]):
        if prev.end_frame == cur.start_frame:  # gap-free adjacency only
            total_pairs += 1
            key = (prev.entity, cur.entity)
            trans_counts[key] = trans_counts.get(key, 0) + 1

    def trans(a: GazeEntity, b: GazeEntity) -> float:
        if total_pairs == 0:
            return 0.0
        return trans_counts.get((a, b), 0) / total_pairs

    def ep_stats(entity: GazeEntity) -> tuple[float, float]:
        ds = durations[entity]
        if not ds:
            return 0.0, 0.0
        mean = sum(ds) / len(ds)
        var = sum((d - mean) ** 2 for d in ds) / len(ds)
        return mean, math.sqrt(var)

    tab, fac, els = ANALYTICS_ENTITIES
    mean_tab, std_tab = ep_stats(tab)
    mean_fac, std_fac = ep_stats(fac)
    mean_els, std_els = ep_stats(els)
    # Flux marginals sum their transition terms in fixed entity order so
    # the identities hold exactly, bit for bit.
    t_tf, t_te = trans(tab, fac), trans(tab, els)
    t_ft, t_fe = trans(fac, tab), trans(fac, els)
    t_et, t_ef = trans(els, tab), trans(els, fac)
    return AttentionFeatures(
        prop_tablet=frames[tab] / detected,
        prop_facilitator=frames[fac] / detected,
        prop_elsewhere=frames[els] / detected,
        ep_mean_tablet=mean_tab,
        ep_std_tablet=std_tab,
        ep_mean_facilitator=mean_fac,
        ep_std_facilitator=std_fac,
        ep_mean_elsewhere=mean_els,
        ep_std_elsewhere=std_els,
        trans_tablet_facilitator=t_tf,
        trans_tablet_elsewhere=t_te,
        trans_facilitator_tablet=t_ft,
        trans_facilitator_elsewhere=t_fe,
        trans_elsewhere_tablet=t_et,
        trans_elsewhere_facilitator=t_ef,
        flux_in_tablet=t_ft + t_et,
        flux_out_tablet=t_tf + t_te,
        flux_in_facilitator=t_tf + t_ef,
        flux_out_facilitator=t_ft + t_fe,
        flux_in_elsewhere=t_te + t_fe,
        flux_out_elsewhere=t_et + t_ef,
        detected_coverage=detected / window.n_frames(),
        ep_count_tablet=len(durations[tab]),
        ep_count_facilitator=len(durations[fac]),
        ep_count_elsewhere=len(durations[els]),
    )


def attention_features_for_labels(
    labels: Sequence[GazeEntity],
    window: ObservationWindow,
    fps: float,
    min_episode_frames: int = 0,
    *,
    max_gap_frames: int = 0,
) -> AttentionFeatures:
    """Segment a window's labels and compute its attention features."""
    if len(labels) != window.n_frames():
        raise InvalidModelError(
            f"got {len(labels)} labels for a {window.n_frames()}-frame window"
        )
    episodes = segment_episodes(
        labels,
        fps,
        min_episode_frames,
        max_gap_frames=max_gap_frames,
        start_frame=window.start_frame,
    )
    return attention_features(episodes, window, fps)


def attitude_features(
    labels: Sequence[EmotionLabel],
    window: ObservationWindow,
    *,
    positive: frozenset[EmotionLabel] = POSITIVE_EMOTIONS,
    negative: frozenset[EmotionLabel] = NEGATIVE_EMOTIONS,
) -> AttitudeFeatures:
    """Positive/negative affect proportions over a window's emotion labels.

    Labels outside both buckets (fear, surprise by default) count toward
    the detected denominator only.
    """
    if len(labels) != window.n_frames():
        raise InvalidModelError(
            f"got {len(labels)} labels for a {window.n_frames()}-frame window"
        )
    detected = pos = neg = 0
    for label in labels:
        if label is EmotionLabel.UNDETECTED:
            continue
        detected += 1
        if label in positive:
            pos += 1
        elif label in negative:
            neg += 1
    if detected == 0:
        raise EmptyWindowError(
            f"window [{window.start_frame}, {window.end_frame}) has no detected emotions"
        )
    return AttitudeFeatures(
        prop_positive=pos / detected,
        prop_negative=neg / detected,
        detected_coverage=detected / window.n_frames(),
    )


PARTIAL_WINDOW_MIN_FRACTION = 0.5


def windowize(
    stream: LabelStream,
    window_seconds: float,
    *,
    partial_min_fraction: float = PARTIAL_WINDOW_MIN_FRACTION,
) -> list[ObservationWindow]:
    """Tile the session span with consecutive non-overlapping windows.

    A trailing partial window is emitted iff it covers at least
    ``partial_min_fraction`` of a full window (default 50%).
    """
    if window_seconds <= 0:
        raise InvalidModelError(f"window_seconds must be positive, got {window_seconds}")
    window_frames = int(window_seconds * stream.fps)
    if window_frames < 1:
        raise InvalidModelError(
            f"window of {window_seconds}s spans no full frame at fps={stream.fps}"
        )
    first = stream.first_frame()
    total = stream.n_frames()
    windows: list[ObservationWindow] = []
    pos = 0
    while pos + window_frames <= total:
        windows.append(
            ObservationWindow(
                start_frame=first + pos,
                end_frame=first + pos + window_frames,
                duration_s=window_frames / stream.fps,
            )
        )
        pos += window_frames
    tail = total - pos
    if tail > 0 and tail >= partial_min_fraction * window_frames:
        windows.append(
            ObservationWindow(
                start_frame=first + pos,
                end_frame=first + total,
                duration_s=tail / stream.fps,
                partial=True,
            )
        )
    return windows


@dataclass(frozen=True, slots=True)
class WindowFeatures:
    """Attention and attitude features for one window; either side is None
    when the window held no detected frames of that kind."""

    window: ObservationWindow
    attention: AttentionFeatures | None
    attitude: AttitudeFeatures | None


def window_features(
    stream: LabelStream,
    window_seconds: float,
    subject_id: str = SUBJECT_PWD,
    min_episode_frames: int = 0,
    *,
    max_gap_frames: int = 0,
    emotion_subject_id: str | None = None,
) -> list[WindowFeatures]:
    """Windowize a stream and compute both feature sets per window.

    Windows without detected gaze (or emotion) frames yield None for that
    side instead of fabricated zeros.
    """
    windows = windowize(stream, window_seconds)
    gaze = stream.gaze_labels(subject_id)
    emotions = stream.emotion_labels(emotion_subject_id or subject_id)
    first = stream.first_frame()
    rows: list[WindowFeatures] = []
    for window in windows:
        lo = window.start_frame - first
        hi = window.end_frame - first
        try:
            attn = attention_features_for_labels(
                gaze[lo:hi],
                window,
                stream.fps,
                min_episode_frames,
                max_gap_frames=max_gap_frames,
            )
        except EmptyWindowError:
            attn = None
        try:
            att = attitude_features(emotions[lo:hi], window)
        except EmptyWindowError:
            att = None
        rows.append(WindowFeatures(window=window, attention=attn, attitude=att))
    return rows


def _period_to_window(
    stream: LabelStream, start_s: float, end_s: float
) -> ObservationWindow:
    fps = stream.fps
    total = stream.n_frames()
    if start_s < 0 or end_s <= start_s:
        raise PeriodOutOfRangeError(
            f"period [{start_s}, {end_s}) is not a forward time range"
        )
    start = int(math.floor(start_s * fps))
    end = int(math.floor(end_s * fps))
    if end > total:
        raise PeriodOutOfRangeError(
            f"period [{start_s}, {end_s})s exceeds the {total / fps}s session"
        )
    if end <= start:
        raise PeriodOutOfRangeError(
            f"period [{start_s}, {end_s})s spans no full frame at fps={fps}"
        )
    first = stream.first_frame()
    return ObservationWindow(
        start_frame=first + start,
        end_frame=first + end,
        duration_s=(end - start) / fps,
    )


def complement_periods(
    periods: Sequence[tuple[float, float]], duration_s: float
) -> list[tuple[float, float]]:
    """Contiguous gaps between sorted periods within [0, duration_s)."""
    out: list[tuple[float, float]] = []
    cursor = 0.0
    for start_s, end_s in sorted(periods):
        if start_s > cursor:
            out.append((cursor, start_s))
        cursor = max(cursor, end_s)
    if cursor < duration_s:
        out.append((cursor, duration_s))
    return out


def period_features(
    stream: LabelStream,
    periods: Sequence[tuple[float, float]],
    subject_id: str = SUBJECT_PWD,
    min_episode_frames: int = 0,
    *,
    complement: bool = False,
    max_gap_frames: int = 0,
) -> list[AttentionFeatures | None]:
    """Attention features per annotated period (or per complement gap).

    Periods are seconds relative to session start. A period with no
    detected frames yields None in its slot rather than being dropped.
    """
    spans: Iterable[tuple[float, float]] = (
        complement_periods(periods, stream.duration_s()) if complement else periods
    )
    gaze = stream.gaze_labels(subject_id)
    first = stream.first_frame()
    out: list[AttentionFeatures | None] = []
    for start_s, end_s in spans:
        window = _period_to_window(stream, start_s, end_s)
        labels = gaze[window.start_frame - first : window.end_frame - first]
        try:
            out.append(
                attention_features_for_labels(
                    labels,
                    window,
                    stream.fps,
                    min_episode_frames,
                    max_gap_frames=max_gap_frames,
                )
            )
        except EmptyWindowError:
            out.append(None)
    return out
