"""Validation harness: compare computed features against expert annotations.

Two methodologies are reproduced: the engaged/not-engaged gaze-proportion
comparison for OME annotations (two-sample KS test over per-segment tablet
proportions), and the 3x21 correlation grid between MPES items and the
attention features, with per-cell significance flags. Ordinal MPES scores
are treated as numeric for Pearson; Spearman is available as an option.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .analytics import period_features
from .errors import (
    AlignmentMismatchError,
    ConstantInputError,
    NoEngagedPeriodsError,
    TooFewSamplesError,
)
from .model import (
    ATTENTION_FEATURE_NAMES,
    MPES_ITEMS,
    AttentionFeatures,
    AttitudeFeatures,
    BosAnnotation,
    LabelStream,
    MpesWindowScore,
)
from .stats import CorrelationResult, KsResult, ks_two_sample, pearson, spearman

UNDEFINED_FLAG = "undefined"


@dataclass(frozen=True, slots=True)
class MatrixCell:
    row: str
    col: str
    result: CorrelationResult | None  # None: correlation undefined (constant input)

    @property
    def flag(self) -> str:
        return UNDEFINED_FLAG if self.result is None else self.result.significance.value


@dataclass(frozen=True)
class CorrelationMatrixReport:
    """3x21 grid of correlations between MPES items and attention features."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[MatrixCell, ...]  # row-major
    window_count: int
    dropped_windows: int
    method: str

    def __post_init__(self):
        if len(self.cells) != len(self.rows) * len(self.cols):
            raise AlignmentMismatchError(
                f"expected {len(self.rows) * len(self.cols)} cells, got {len(self.cells)}"
            )

    def cell(self, row: str, col: str) -> MatrixCell:
        i = self.rows.index(row)
        j = self.cols.index(col)
        return self.cells[i * len(self.cols) + j]

    def to_json_obj(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "cells": [
                {
                    "row": c.row,
                    "col": c.col,
                    "r": None if c.result is None else c.result.r,
                    "p": None if c.result is None else c.result.p_value,
                    "n": self.window_count if c.result is None else c.result.n,
                    "flag": c.flag,
                }
                for c in self.cells
            ],
            "meta": {
                "window_count": self.window_count,
                "dropped_windows": self.dropped_windows,
                "method": self.method,
                "significant_p": 0.05,
                "marginal_p": 0.10,
            },
        }


def mpes_correlation(
    features: Sequence[AttentionFeatures | None],
    scores: Sequence[MpesWindowScore],
    method: str = "pearson",
) -> CorrelationMatrixReport:
    """Correlate each MPES item against each attention feature.

    Features and scores align one-to-one by position. Windows whose
    features are undefined (None) are dropped together with their score
    and counted in the report metadata. Cells where either column is
    constant are flagged undefined rather than dropped silently.
    """
    if method not in ("pearson", "spearman"):
        raise ValueError(f"unknown correlation method {method!r}")
    if len(features) != len(scores):
        raise AlignmentMismatchError(
            f"{len(features)} feature windows vs {len(scores)} score windows"
        )
    pairs = [(f, s) for f, s in zip(features, scores) if f is not None]
    dropped = len(features) - len(pairs)
    if len(pairs) < 3:
        raise TooFewSamplesError(
            f"need at least 3 aligned windows with defined features, got {len(pairs)}"
        )
    kept_features = [f for f, _ in pairs]
    kept_scores = [s for _, s in pairs]
    correlate = pearson if method == "pearson" else spearman

    columns: dict[str, list[float]] = {
        name: [getattr(f, name) for f in kept_features] for name in ATTENTION_FEATURE_NAMES
    }
    cells: list[MatrixCell] = []
    for item in MPES_ITEMS:
        score_column = [float(s.value_for(item)) for s in kept_scores]
        for name in ATTENTION_FEATURE_NAMES:
            try:
                result = correlate(columns[name], score_column)
            except ConstantInputError:
                result = None
            cells.append(MatrixCell(row=item, col=name, result=result))
    return CorrelationMatrixReport(
        rows=tuple(MPES_ITEMS),
        cols=tuple(ATTENTION_FEATURE_NAMES),
        cells=tuple(cells),
        window_count=len(pairs),
        dropped_windows=dropped,
        method=method,
    )


@dataclass(frozen=True)
class OmeComparison:
    """Per-segment tablet-gaze proportions, engaged vs not-engaged."""

    engaged: tuple[float, ...]
    not_engaged: tuple[float, ...]
    ks: KsResult | None  # None iff the not-engaged sample is empty
    complement_empty: bool
    skipped_engaged: int
    skipped_not_engaged: int

    def to_json_obj(self) -> dict:
        return {
            "engaged_prop_tablet": list(self.engaged),
            "not_engaged_prop_tablet": list(self.not_engaged),
            "ks": (
                None
                if self.ks is None
                else {
                    "d": self.ks.d_statistic,
                    "p": self.ks.p_value,
                    "n_engaged": self.ks.n1,
                    "n_not_engaged": self.ks.n2,
                }
            ),
            "meta": {
                "complement_empty": self.complement_empty,
                "skipped_engaged_segments": self.skipped_engaged,
                "skipped_not_engaged_segments": self.skipped_not_engaged,
            },
        }


def ome_comparison(
    sessions: Sequence[tuple[LabelStream, BosAnnotation]],
    min_episode_frames: int = 0,
) -> OmeComparison:
    """Pool per-segment tablet-gaze proportions across sessions and compare
    engaged segments against the complement segments with a KS test.

    Complement segments are the contiguous gaps between engaged periods,
    one segment per gap. Segments with no detected frames are skipped and
    counted, never silently dropped.
    """
    if not sessions:
        raise NoEngagedPeriodsError("no sessions provided")
    engaged: list[float] = []
    not_engaged: list[float] = []
    skipped_engaged = 0
    skipped_not_engaged = 0
    for stream, annotation in sessions:
        if annotation.scale != "OME":
            raise AlignmentMismatchError(
                f"session {stream.session_id!r} carries a {annotation.scale} annotation"
            )
        periods = [(p.start_s, p.end_s) for p in annotation.ome]
        for feats in period_features(stream, periods, min_episode_frames=min_episode_frames):
            if feats is None:
                skipped_engaged += 1
            else:
                engaged.append(feats.prop_tablet)
        for feats in period_features(
            stream, periods, min_episode_frames=min_episode_frames, complement=True
        ):
            if feats is None:
                skipped_not_engaged += 1
            else:
                not_engaged.append(feats.prop_tablet)
    if not engaged:
        raise NoEngagedPeriodsError("no engaged segment carried detected frames")
    complement_empty = not not_engaged and skipped_not_engaged == 0
    ks = ks_two_sample(engaged, not_engaged) if not_engaged else None
    return OmeComparison(
        engaged=tuple(engaged),
        not_engaged=tuple(not_engaged),
        ks=ks,
        complement_empty=complement_empty,
        skipped_engaged=skipped_engaged,
        skipped_not_engaged=skipped_not_engaged,
    )


def attitude_correlation(
    facilitator_attitude: Sequence[AttitudeFeatures],
    pleasure_scores: Sequence[float],
) -> CorrelationResult:
    """Correlate per-window facilitator positive-affect proportion with
    expert pleasure scores."""
    return pearson([a.prop_positive for a in facilitator_attitude], pleasure_scores)


# --- report rendering ----------------------------------------------------

def _r_to_gray(r: float | None) -> int:
    if r is None:
        return 128  # undefined cells render mid-gray; the sidecar carries the flag
    return int(round((r + 1.0) * 127.5))


def render_pgm(report: CorrelationMatrixReport) -> str:
    """ASCII PGM (P2): one pixel per cell, r in [-1, 1] mapped to [0, 255]."""
    lines = ["P2", f"{len(report.cols)} {len(report.rows)}", "255"]
    for i in range(len(report.rows)):
        row_cells = report.cells[i * len(report.cols) : (i + 1) * len(report.cols)]
        lines.append(" ".join(str(_r_to_gray(c.result.r if c.result else None)) for c in row_cells))
    return "\n".join(lines) + "\n"


def render_flags(report: CorrelationMatrixReport) -> str:
    """Sidecar listing one ``row,col,flag`` line per cell, row-major."""
    lines = ["row,col,flag"]
    for cell in report.cells:
        lines.append(f"{cell.row},{cell.col},{cell.flag}")
    return "\n".join(lines) + "\n"


def render_report(
    report: CorrelationMatrixReport,
    json_path: str,
    pgm_path: str | None = None,
    flags_path: str | None = None,
) -> None:
    """Write the JSON report, the PGM grid, and the significance sidecar.

    Deterministic: identical reports produce byte-identical files. Default
    image/sidecar paths derive from ``json_path``.
    """
    if pgm_path is None:
        pgm_path = _with_suffix(json_path, ".pgm")
    if flags_path is None:
        flags_path = _with_suffix(json_path, ".flags.csv")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(pgm_path, "w", encoding="utf-8") as fh:
        fh.write(render_pgm(report))
    with open(flags_path, "w", encoding="utf-8") as fh:
        fh.write(render_flags(report))


def _with_suffix(path: str, suffix: str) -> str:
    base = path[:-5] if path.endswith(".json") else path
    return base + suffix
