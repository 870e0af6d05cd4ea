"""File ingestion and serialization.

Frame-level streams travel as flat CSV (practical for therapist and
researcher tooling); configs and reports as JSON. Parsers are strict:
every row either becomes a record or raises with a line/field diagnostic,
so nothing is ever silently dropped. Writers emit canonical files that
reparse to identical values.

Formats
-------
labels CSV        header ``frame,subject,gaze,emotion``
gaze-points CSV   header ``frame,subject,x,y,detected``
regions JSON      ``{"frame_width", "frame_height", "target_activity_space":
                  {"x","y","w","h"}, "facilitator": {...}, "subject": {...}}``
MPES CSV          header ``window_index,active,passive,other``
OME CSV           header ``start_s,end_s,attention,attitude``
features CSV/JSON see FEATURE_CSV_COLUMNS
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

from .analytics import WindowFeatures
from .errors import (
    DuplicateFrameError,
    EmptyFileError,
    MalformedJsonError,
    MalformedRowError,
    MissingRegionError,
    NonMonotonicFramesError,
    OutOfBoundsError,
    OutOfRangeScoreError,
    OverlappingPeriodsError,
)
from .model import (
    ATTENTION_FEATURE_NAMES,
    VALID_SUBJECTS,
    AttentionFeatures,
    BosAnnotation,
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

LABELS_HEADER = ["frame", "subject", "gaze", "emotion"]
POINTS_HEADER = ["frame", "subject", "x", "y", "detected"]
MPES_HEADER = ["window_index", "active", "passive", "other"]
OME_HEADER = ["start_s", "end_s", "attention", "attitude"]

_GAZE_TOKENS = {e.value: e for e in GazeEntity}
_EMOTION_TOKENS = {e.value: e for e in EmotionLabel}


def _read_rows(path: str, header: list[str]) -> list[tuple[int, list[str]]]:
    """Read a CSV, validate its header, and return (line_number, row) pairs."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise EmptyFileError(path) from None
        except csv.Error as exc:
            raise MalformedRowError(path, 1, f"unreadable CSV: {exc}") from exc
        if [cell.strip() for cell in first] != header:
            raise MalformedRowError(
                path, 1, f"expected header {','.join(header)!r}, got {','.join(first)!r}"
            )
        rows: list[tuple[int, list[str]]] = []
        line = 1
        try:
            for row in reader:
                line += 1
                if not row or all(cell.strip() == "" for cell in row):
                    raise MalformedRowError(path, line, "blank row")
                if len(row) != len(header):
                    raise MalformedRowError(
                        path, line, f"expected {len(header)} fields, got {len(row)}"
                    )
                rows.append((line, row))
        except csv.Error as exc:
            raise MalformedRowError(path, line + 1, f"unreadable CSV: {exc}") from exc
    if not rows:
        raise EmptyFileError(path)
    return rows


def _parse_int(path: str, line: int, field: str, text: str) -> int:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        raise MalformedRowError(path, line, f"{field}={text!r} is not an integer") from None


def _parse_float(path: str, line: int, field: str, text: str) -> float:
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        raise MalformedRowError(path, line, f"{field}={text!r} is not a number") from None
    if not math.isfinite(value):
        raise MalformedRowError(path, line, f"{field}={text!r} is not finite")
    return value


def _check_frame_order(
    path: str, line: int, subject: str, frame: int, last: dict[str, int]
) -> None:
    prev = last.get(subject)
    if prev is not None:
        if frame == prev:
            raise DuplicateFrameError(path, line, subject, frame)
        if frame < prev:
            raise NonMonotonicFramesError(path, line, subject, frame)
    last[subject] = frame


def parse_label_stream(path: str, fps: float, session_id: str | None = None) -> LabelStream:
    """Parse a labels CSV into a validated stream.

    Rows must be strictly increasing in frame per subject; unknown gaze or
    emotion tokens are rejected with their line number.
    """
    records: list[FrameRecord] = []
    last: dict[str, int] = {}
    for line, row in _read_rows(path, LABELS_HEADER):
        frame = _parse_int(path, line, "frame", row[0])
        if frame < 0:
            raise MalformedRowError(path, line, f"frame={frame} is negative")
        subject = row[1].strip()
        if subject not in VALID_SUBJECTS:
            raise MalformedRowError(
                path, line, f"subject={subject!r} not in {sorted(VALID_SUBJECTS)}"
            )
        gaze = _GAZE_TOKENS.get(row[2].strip())
        if gaze is None:
            raise MalformedRowError(path, line, f"unknown gaze token {row[2].strip()!r}")
        emotion = _EMOTION_TOKENS.get(row[3].strip())
        if emotion is None:
            raise MalformedRowError(path, line, f"unknown emotion token {row[3].strip()!r}")
        _check_frame_order(path, line, subject, frame, last)
        records.append(
            FrameRecord(frame_index=frame, gaze=gaze, emotion=emotion, subject_id=subject)
        )
    records.sort(key=lambda r: (r.frame_index, r.subject_id))
    return LabelStream(
        session_id=session_id if session_id is not None else path,
        fps=fps,
        records=tuple(records),
    )


def labels_csv_text(records: Iterable[FrameRecord]) -> str:
    """Canonical labels CSV text (rows sorted by frame, then subject)."""
    ordered = sorted(records, key=lambda r: (r.frame_index, r.subject_id))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABELS_HEADER)
    for rec in ordered:
        writer.writerow([rec.frame_index, rec.subject_id, rec.gaze.value, rec.emotion.value])
    return buf.getvalue()


def write_label_stream(stream: LabelStream, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(labels_csv_text(stream.records))


def parse_gaze_points(path: str) -> list[GazePointRecord]:
    """Parse a gaze-points CSV; undetected rows must carry empty coordinates."""
    points: list[GazePointRecord] = []
    last: dict[str, int] = {}
    for line, row in _read_rows(path, POINTS_HEADER):
        frame = _parse_int(path, line, "frame", row[0])
        if frame < 0:
            raise MalformedRowError(path, line, f"frame={frame} is negative")
        subject = row[1].strip()
        if subject not in VALID_SUBJECTS:
            raise MalformedRowError(
                path, line, f"subject={subject!r} not in {sorted(VALID_SUBJECTS)}"
            )
        token = row[4].strip().lower()
        if token in ("true", "1"):
            detected = True
        elif token in ("false", "0"):
            detected = False
        else:
            raise MalformedRowError(path, line, f"detected={row[4].strip()!r} is not a boolean")
        if detected:
            x = _parse_float(path, line, "x", row[2])
            y = _parse_float(path, line, "y", row[3])
        else:
            if row[2].strip() or row[3].strip():
                raise MalformedRowError(
                    path, line, "undetected row must leave x and y empty"
                )
            x = y = None
        _check_frame_order(path, line, subject, frame, last)
        points.append(
            GazePointRecord(
                frame_index=frame, subject_id=subject, gaze_x=x, gaze_y=y, detected=detected
            )
        )
    return points


def gaze_points_csv_text(points: Sequence[GazePointRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(POINTS_HEADER)
    for p in points:
        if p.detected:
            writer.writerow([p.frame_index, p.subject_id, repr(p.gaze_x), repr(p.gaze_y), "true"])
        else:
            writer.writerow([p.frame_index, p.subject_id, "", "", "false"])
    return buf.getvalue()


def write_gaze_points(points: Sequence[GazePointRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(gaze_points_csv_text(points))


_REGION_NAMES = ("target_activity_space", "facilitator", "subject")
_RECT_KEYS = {"x", "y", "w", "h"}


def parse_region_config(path: str) -> RegionConfig:
    """Parse and bounds-check the regions JSON."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(path, f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedJsonError(path, "top-level value must be an object")
    expected = set(_REGION_NAMES) | {"frame_width", "frame_height"}
    unknown = set(data) - expected
    if unknown:
        raise MalformedJsonError(path, f"unknown keys: {sorted(unknown)}")
    for key in ("frame_width", "frame_height"):
        if key not in data:
            raise MalformedJsonError(path, f"missing key '{key}'")
        if not isinstance(data[key], int) or isinstance(data[key], bool) or data[key] <= 0:
            raise MalformedJsonError(path, f"'{key}' must be a positive integer")
    frame_w, frame_h = data["frame_width"], data["frame_height"]

    rects: dict[str, Rect] = {}
    for name in _REGION_NAMES:
        if name not in data:
            raise MissingRegionError(path, name)
        raw = data[name]
        if not isinstance(raw, dict) or set(raw) != _RECT_KEYS:
            raise MalformedJsonError(
                path, f"region '{name}' must be an object with keys x, y, w, h"
            )
        values = {}
        for key in ("x", "y", "w", "h"):
            v = raw[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise MalformedJsonError(path, f"region '{name}' field '{key}' must be a number")
            values[key] = float(v)
        if values["w"] <= 0 or values["h"] <= 0:
            raise OutOfBoundsError(name, f"rect size {values['w']}x{values['h']} is not positive", path)
        if (
            values["x"] < 0
            or values["y"] < 0
            or values["x"] + values["w"] > frame_w
            or values["y"] + values["h"] > frame_h
        ):
            raise OutOfBoundsError(
                name,
                f"rect ({values['x']}, {values['y']}, {values['w']}, {values['h']}) "
                f"exceeds the {frame_w}x{frame_h} frame",
                path,
            )
        rects[name] = Rect(values["x"], values["y"], values["w"], values["h"])
    return RegionConfig(
        target_activity_space=rects["target_activity_space"],
        facilitator=rects["facilitator"],
        subject=rects["subject"],
        frame_width=frame_w,
        frame_height=frame_h,
    )


def write_region_config(regions: RegionConfig, path: str) -> None:
    def rect_dict(rect: Rect) -> dict:
        return {"x": rect.x, "y": rect.y, "w": rect.width, "h": rect.height}

    payload = {
        "frame_width": regions.frame_width,
        "frame_height": regions.frame_height,
        "target_activity_space": rect_dict(regions.target_activity_space),
        "facilitator": rect_dict(regions.facilitator),
        "subject": rect_dict(regions.subject),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def parse_bos(path: str, scale: str) -> BosAnnotation:
    """Parse an expert annotation file for the given scale (MPES or OME)."""
    if scale not in ("MPES", "OME"):
        raise MalformedRowError(path, 0, f"unknown scale {scale!r}; expected MPES or OME")
    if scale == "MPES":
        scores: list[MpesWindowScore] = []
        seen: set[int] = set()
        for line, row in _read_rows(path, MPES_HEADER):
            idx = _parse_int(path, line, "window_index", row[0])
            if idx < 0:
                raise MalformedRowError(path, line, f"window_index={idx} is negative")
            if idx in seen:
                raise MalformedRowError(path, line, f"duplicate window_index {idx}")
            seen.add(idx)
            values = {}
            for field, text in zip(("active", "passive", "other"), row[1:]):
                value = _parse_int(path, line, field, text)
                if value not in (0, 1, 2):
                    raise OutOfRangeScoreError(path, line, field, value, "{0, 1, 2}")
                values[field] = value
            scores.append(MpesWindowScore(window_index=idx, **values))
        scores.sort(key=lambda s: s.window_index)
        return BosAnnotation(scale="MPES", mpes=tuple(scores))

    periods: list[OmePeriod] = []
    prev_end: float | None = None
    prev_line = 0
    rows = _read_rows(path, OME_HEADER)
    parsed: list[tuple[int, float, float, int, int]] = []
    for line, row in rows:
        start_s = _parse_float(path, line, "start_s", row[0])
        end_s = _parse_float(path, line, "end_s", row[1])
        if start_s < 0:
            raise MalformedRowError(path, line, f"start_s={start_s} is negative")
        if end_s <= start_s:
            raise MalformedRowError(
                path, line, f"period [{start_s}, {end_s}) is not a forward time range"
            )
        ratings = {}
        for field, text in zip(("attention", "attitude"), row[2:]):
            value = _parse_int(path, line, field, text)
            if not 1 <= value <= 7:
                raise OutOfRangeScoreError(path, line, field, value, "1..7")
            ratings[field] = value
        parsed.append((line, start_s, end_s, ratings["attention"], ratings["attitude"]))
    parsed.sort(key=lambda t: t[1])
    for line, start_s, end_s, attention, attitude in parsed:
        if prev_end is not None and start_s < prev_end:
            raise OverlappingPeriodsError(
                path,
                line,
                f"period starting at {start_s}s overlaps the one ending at {prev_end}s "
                f"(line {prev_line})",
            )
        prev_end, prev_line = end_s, line
        periods.append(
            OmePeriod(start_s=start_s, end_s=end_s, attention=attention, attitude=attitude)
        )
    return BosAnnotation(scale="OME", ome=tuple(periods))


def write_mpes(scores: Iterable[MpesWindowScore], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MPES_HEADER)
        for s in sorted(scores, key=lambda s: s.window_index):
            writer.writerow([s.window_index, s.active, s.passive, s.other])


def write_ome(periods: Iterable[OmePeriod], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(OME_HEADER)
        for p in sorted(periods, key=lambda p: p.start_s):
            writer.writerow([repr(p.start_s), repr(p.end_s), p.attention, p.attitude])


# --- feature serialization ----------------------------------------------

FEATURE_CSV_COLUMNS = (
    "window_index",
    "start_frame",
    "end_frame",
    "start_s",
    "end_s",
    "partial",
    "gaze_defined",
    "gaze_coverage",
    "emotion_defined",
    "emotion_coverage",
    *ATTENTION_FEATURE_NAMES,
    "prop_positive",
    "prop_negative",
    "ep_count_tablet",
    "ep_count_facilitator",
    "ep_count_elsewhere",
)


def _fmt(value: float) -> str:
    return repr(float(value))


def _feature_row(index: int, wf: WindowFeatures, fps: float) -> list:
    window = wf.window
    row: list = [
        index,
        window.start_frame,
        window.end_frame,
        _fmt(window.start_frame / fps),
        _fmt(window.end_frame / fps),
        "true" if window.partial else "false",
        "true" if wf.attention is not None else "false",
        _fmt(wf.attention.detected_coverage if wf.attention else 0.0),
        "true" if wf.attitude is not None else "false",
        _fmt(wf.attitude.detected_coverage if wf.attitude else 0.0),
    ]
    if wf.attention is not None:
        row.extend(_fmt(v) for v in wf.attention.as_vector())
    else:
        row.extend("" for _ in ATTENTION_FEATURE_NAMES)
    if wf.attitude is not None:
        row.extend([_fmt(wf.attitude.prop_positive), _fmt(wf.attitude.prop_negative)])
    else:
        row.extend(["", ""])
    if wf.attention is not None:
        row.extend(
            [
                wf.attention.ep_count_tablet,
                wf.attention.ep_count_facilitator,
                wf.attention.ep_count_elsewhere,
            ]
        )
    else:
        row.extend([0, 0, 0])
    return row


def features_csv_text(rows: Sequence[WindowFeatures], fps: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_CSV_COLUMNS)
    for i, wf in enumerate(rows):
        writer.writerow(_feature_row(i, wf, fps))
    return buf.getvalue()


def write_features_csv(rows: Sequence[WindowFeatures], fps: float, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(features_csv_text(rows, fps))


def features_to_json_obj(rows: Sequence[WindowFeatures], fps: float) -> list[dict]:
    out = []
    for i, wf in enumerate(rows):
        window = wf.window
        entry: dict = {
            "window_index": i,
            "start_frame": window.start_frame,
            "end_frame": window.end_frame,
            "start_s": window.start_frame / fps,
            "end_s": window.end_frame / fps,
            "partial": window.partial,
            "attention": wf.attention.to_dict() if wf.attention else None,
            "gaze_coverage": wf.attention.detected_coverage if wf.attention else 0.0,
            "episode_counts": (
                {
                    "tablet": wf.attention.ep_count_tablet,
                    "facilitator": wf.attention.ep_count_facilitator,
                    "elsewhere": wf.attention.ep_count_elsewhere,
                }
                if wf.attention
                else None
            ),
            "attitude": (
                {
                    "prop_positive": wf.attitude.prop_positive,
                    "prop_negative": wf.attitude.prop_negative,
                }
                if wf.attitude
                else None
            ),
            "emotion_coverage": wf.attitude.detected_coverage if wf.attitude else 0.0,
        }
        out.append(entry)
    return out


def features_json_text(rows: Sequence[WindowFeatures], fps: float) -> str:
    return json.dumps(features_to_json_obj(rows, fps), indent=2) + "\n"


def write_features_json(rows: Sequence[WindowFeatures], fps: float, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(features_json_text(rows, fps))


def _parse_bool(path: str, line: int, field: str, text: str) -> bool:
    token = text.strip().lower()
    if token in ("true", "1"):
        return True
    if token in ("false", "0"):
        return False
    raise MalformedRowError(path, line, f"{field}={text!r} is not a boolean")


def parse_features_csv(path: str) -> list[AttentionFeatures | None]:
    """Read back the attention features of a features CSV, None for windows
    whose gaze features were undefined."""
    out: list[AttentionFeatures | None] = []
    header = list(FEATURE_CSV_COLUMNS)
    col = {name: i for i, name in enumerate(header)}
    for line, row in _read_rows(path, header):
        defined = _parse_bool(path, line, "gaze_defined", row[col["gaze_defined"]])
        if not defined:
            out.append(None)
            continue
        kwargs = {
            name: _parse_float(path, line, name, row[col[name]])
            for name in ATTENTION_FEATURE_NAMES
        }
        out.append(
            AttentionFeatures(
                **kwargs,
                detected_coverage=_parse_float(
                    path, line, "gaze_coverage", row[col["gaze_coverage"]]
                ),
                ep_count_tablet=_parse_int(
                    path, line, "ep_count_tablet", row[col["ep_count_tablet"]]
                ),
                ep_count_facilitator=_parse_int(
                    path, line, "ep_count_facilitator", row[col["ep_count_facilitator"]]
                ),
                ep_count_elsewhere=_parse_int(
                    path, line, "ep_count_elsewhere", row[col["ep_count_elsewhere"]]
                ),
            )
        )
    return out
