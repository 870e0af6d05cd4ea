"""Command-line surface for processing recorded sessions.

Every subcommand is a thin client over the library: outputs equal what the
corresponding library calls produce on identical inputs. Diagnostics go to
stderr; data goes to files (or to stdout with ``--stdout``).

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import functools
import json
import logging
import os
import sys
from collections import defaultdict

import click

from . import __version__
from .analytics import window_features
from .errors import AveidError
from .gaze import smooth_labels as _smooth
from .gaze import assign_entity, clamp_point
from .ingest import (
    features_csv_text,
    features_json_text,
    labels_csv_text,
    parse_bos,
    parse_features_csv,
    parse_gaze_points,
    parse_label_stream,
    parse_region_config,
)
from .model import EmotionLabel, FrameRecord
from .synth import generate, load_generator_spec
from .validation import mpes_correlation, ome_comparison, render_report

log = logging.getLogger("aveid")


def _configure_logging() -> None:
    level = os.environ.get("AVEID_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _load_config(ctx: click.Context, param: click.Parameter, value: str | None):
    """Seed click's default map from a JSON config; flags override it."""
    if value is None:
        return None
    try:
        with open(value, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config {value}: {exc}") from exc
    if not isinstance(config, dict):
        raise click.BadParameter(f"config {value} must be a JSON object")
    ctx.default_map = config
    return value


def runtime_errors(fn):
    """Map domain and I/O errors to exit code 1 with a machine-readable line."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (AveidError, OSError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _positive_float(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be positive")
    return value


def _odd_positive_int(ctx, param, value):
    if value is not None and (value < 1 or value % 2 == 0):
        raise click.BadParameter("must be an odd integer >= 1")
    return value


def _non_negative_int(ctx, param, value):
    if value is not None and value < 0:
        raise click.BadParameter("must be >= 0")
    return value


def _emit(text: str, out: str | None, to_stdout: bool, what: str) -> None:
    if to_stdout:
        click.echo(text, nl=False)
        return
    if out is None:
        raise click.UsageError(f"give --out PATH or --stdout for the {what}")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    log.info("wrote %s to %s", what, out)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="aveid")
@click.option(
    "--config",
    type=click.Path(exists=False, dir_okay=False),
    callback=_load_config,
    expose_value=False,
    is_eager=True,
    help="JSON file supplying default values for any flag (flags override it).",
)
def main() -> None:
    """Engagement analytics over gaze/emotion label streams."""
    _configure_logging()


@main.command()
@click.option("--gaze", "gaze_path", required=True, type=click.Path(dir_okay=False))
@click.option("--regions", "regions_path", required=True, type=click.Path(dir_okay=False))
@click.option("--smooth", default=1, show_default=True, callback=_odd_positive_int,
              help="Majority-vote window size (odd; 1 disables smoothing).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--stdout", "to_stdout", is_flag=True, help="Stream the CSV to stdout.")
@runtime_errors
def assign(gaze_path: str, regions_path: str, smooth: int, out: str | None, to_stdout: bool):
    """Assign gaze points to entities and write a labels CSV.

    The emotion column is filled with 'undetected' (emotions come from the
    upstream emotion detector, not from gaze points).
    """
    regions = parse_region_config(regions_path)
    points = parse_gaze_points(gaze_path)
    by_subject: dict[str, list] = defaultdict(list)
    for p in points:
        by_subject[p.subject_id].append(p)
    records: list[FrameRecord] = []
    for subject, pts in by_subject.items():
        labels = _smooth(
            [assign_entity(clamp_point(p, regions), regions) for p in pts], smooth
        )
        records.extend(
            FrameRecord(
                frame_index=p.frame_index,
                gaze=label,
                emotion=EmotionLabel.UNDETECTED,
                subject_id=subject,
            )
            for p, label in zip(pts, labels)
        )
    log.info("assigned %d points across %d subject(s)", len(points), len(by_subject))
    _emit(labels_csv_text(records), out, to_stdout, "labels CSV")


@main.command()
@click.option("--labels", "labels_path", required=True, type=click.Path(dir_okay=False))
@click.option("--fps", required=True, type=float, callback=_positive_float)
@click.option("--window", "window_seconds", required=True, type=float, callback=_positive_float,
              help="Observation window length in seconds.")
@click.option("--min-episode", default=0, show_default=True, callback=_non_negative_int,
              help="Merge episodes shorter than this many frames.")
@click.option("--max-gap", default=0, show_default=True, callback=_non_negative_int,
              help="Bridge undetected gaps up to this many frames.")
@click.option("--subject", default="pwd", show_default=True,
              type=click.Choice(["pwd", "facilitator"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--json-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the features as JSON to this path.")
@click.option("--stdout", "to_stdout", is_flag=True, help="Stream the CSV to stdout.")
@runtime_errors
def features(
    labels_path: str,
    fps: float,
    window_seconds: float,
    min_episode: int,
    max_gap: int,
    subject: str,
    out: str | None,
    json_out: str | None,
    to_stdout: bool,
):
    """Compute per-window attention and attitude features from a labels CSV."""
    stream = parse_label_stream(labels_path, fps)
    rows = window_features(
        stream,
        window_seconds,
        subject_id=subject,
        min_episode_frames=min_episode,
        max_gap_frames=max_gap,
    )
    log.info("computed features for %d window(s)", len(rows))
    if json_out is not None:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(features_json_text(rows, fps))
        log.info("wrote features JSON to %s", json_out)
    _emit(features_csv_text(rows, fps), out, to_stdout, "features CSV")


@main.group()
def validate() -> None:
    """Validate computed features against expert annotations."""


@validate.command("mpes")
@click.option("--features", "features_path", required=True, type=click.Path(dir_okay=False))
@click.option("--scores", "scores_path", required=True, type=click.Path(dir_okay=False))
@click.option("--method", default="pearson", show_default=True,
              type=click.Choice(["pearson", "spearman"]))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--image", "image_path", type=click.Path(dir_okay=False), default=None,
              help="PGM grid path (default: derived from --out).")
@runtime_errors
def validate_mpes(features_path: str, scores_path: str, method: str, out: str, image_path):
    """Correlate the 21 attention features against MPES window scores.

    Feature row i pairs with the i-th score row (sorted by window_index).
    """
    feats = parse_features_csv(features_path)
    annotation = parse_bos(scores_path, "MPES")
    report = mpes_correlation(feats, annotation.mpes, method=method)
    render_report(report, out, image_path)
    log.info(
        "wrote 3x%d correlation report over %d window(s) to %s",
        len(report.cols), report.window_count, out,
    )


@validate.command("ome")
@click.option("--labels", "labels_path", required=True, type=click.Path(dir_okay=False))
@click.option("--fps", required=True, type=float, callback=_positive_float)
@click.option("--periods", "periods_path", required=True, type=click.Path(dir_okay=False))
@click.option("--min-episode", default=0, show_default=True, callback=_non_negative_int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@runtime_errors
def validate_ome(labels_path: str, fps: float, periods_path: str, min_episode: int, out: str):
    """Compare tablet-gaze proportions in engaged vs not-engaged segments."""
    stream = parse_label_stream(labels_path, fps)
    annotation = parse_bos(periods_path, "OME")
    result = ome_comparison([(stream, annotation)], min_episode_frames=min_episode)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(result.to_json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info(
        "wrote OME comparison (%d engaged, %d not-engaged segments) to %s",
        len(result.engaged), len(result.not_engaged), out,
    )


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--stdout", "to_stdout", is_flag=True, help="Stream the CSV to stdout.")
@runtime_errors
def synth(spec_path: str, out: str | None, to_stdout: bool):
    """Generate a deterministic synthetic labels CSV from a spec JSON."""
    spec = load_generator_spec(spec_path)
    stream = generate(spec)
    log.info("generated %d frames (seed %d)", len(stream.records), spec.seed)
    _emit(labels_csv_text(stream.records), out, to_stdout, "labels CSV")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@runtime_errors
def serve(host: str, port: int):
    """Run the HTTP service (FastAPI app) for multi-client use."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
