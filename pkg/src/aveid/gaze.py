"""Gaze-point to entity assignment with optional temporal smoothing.

Starts from the upstream regressor's per-frame point output and produces
the three-way gaze label (tablet / facilitator / elsewhere) plus
undetected, which is what the analytics consume.
"""

from __future__ import annotations

from typing import Sequence

from .errors import InvalidWindowError, OutOfBoundsError
from .model import GazeEntity, GazePointRecord, Rect, RegionConfig

# Regressor jitter at frame borders: points at most this far outside the
# frame are clamped onto it; anything farther is rejected.
CLAMP_TOLERANCE_PX = 2.0


def clamp_point(
    point: GazePointRecord,
    regions: RegionConfig,
    tolerance_px: float = CLAMP_TOLERANCE_PX,
) -> GazePointRecord:
    """Clamp a detected point onto the frame, rejecting gross outliers."""
    if not point.detected:
        return point
    x, y = point.gaze_x, point.gaze_y
    if (
        x < -tolerance_px
        or y < -tolerance_px
        or x > regions.frame_width + tolerance_px
        or y > regions.frame_height + tolerance_px
    ):
        raise OutOfBoundsError(
            f"frame {point.frame_index}",
            f"gaze point ({x}, {y}) lies more than {tolerance_px}px outside "
            f"the {regions.frame_width}x{regions.frame_height} frame",
        )
    cx = min(max(x, 0.0), float(regions.frame_width))
    cy = min(max(y, 0.0), float(regions.frame_height))
    if cx == x and cy == y:
        return point
    return GazePointRecord(
        frame_index=point.frame_index,
        subject_id=point.subject_id,
        gaze_x=cx,
        gaze_y=cy,
        detected=True,
    )


def _distance_sq_to_center(rect: Rect, x: float, y: float) -> float:
    cx, cy = rect.center()
    return (x - cx) ** 2 + (y - cy) ** 2


def assign_entity(point: GazePointRecord, regions: RegionConfig) -> GazeEntity:
    """Classify one gaze point against the configured regions.

    Containment is half-open per Rect. A point inside both regions goes to
    the nearer rect center; exact equidistance resolves to the tablet
    (the target activity space is the measure of primary interest).
    """
    if not point.detected:
        return GazeEntity.UNDETECTED
    x, y = point.gaze_x, point.gaze_y
    in_tablet = regions.target_activity_space.contains(x, y)
    in_facilitator = regions.facilitator.contains(x, y)
    if in_tablet and in_facilitator:
        d_tab = _distance_sq_to_center(regions.target_activity_space, x, y)
        d_fac = _distance_sq_to_center(regions.facilitator, x, y)
        return GazeEntity.FACILITATOR if d_fac < d_tab else GazeEntity.TABLET
    if in_tablet:
        return GazeEntity.TABLET
    if in_facilitator:
        return GazeEntity.FACILITATOR
    return GazeEntity.ELSEWHERE


def smooth_labels(
    labels: Sequence[GazeEntity], window_k: int
) -> list[GazeEntity]:
    """Sliding majority vote over a centered window of ``window_k`` frames.

    Undetected frames neither vote nor change (smoothing must not invent
    detections); ties keep the original label; windows truncate at the
    sequence edges; k=1 is the identity.
    """
    if window_k < 1 or window_k % 2 == 0:
        raise InvalidWindowError(f"window_k must be odd and >= 1, got {window_k}")
    if window_k == 1:
        return list(labels)
    half = window_k // 2
    n = len(labels)
    out: list[GazeEntity] = []
    for i, label in enumerate(labels):
        if label is GazeEntity.UNDETECTED:
            out.append(label)
            continue
        counts: dict[GazeEntity, int] = {}
        for j in range(max(0, i - half), min(n, i + half + 1)):
            neighbor = labels[j]
            if neighbor is not GazeEntity.UNDETECTED:
                counts[neighbor] = counts.get(neighbor, 0) + 1
        best = max(counts.values())
        winners = [entity for entity, c in counts.items() if c == best]
        out.append(winners[0] if len(winners) == 1 else label)
    return out


def label_pipeline(
    points: Sequence[GazePointRecord],
    regions: RegionConfig,
    window_k: int = 1,
) -> list[GazeEntity]:
    """Clamp, assign, and smooth a whole point sequence."""
    assigned = [assign_entity(clamp_point(p, regions), regions) for p in points]
    return smooth_labels(assigned, window_k)
