"""HTTP service exposing the analytics pipeline to multiple clients.

Every endpoint is a thin shell over the library: results are identical to
calling the corresponding functions directly. Domain errors map to 422
responses carrying the error class and its diagnostic message.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analytics import window_features
from ..errors import AveidError
from ..gaze import label_pipeline
from ..ingest import labels_csv_text
from ..model import BosAnnotation
from ..synth import generate
from ..validation import attitude_correlation, mpes_correlation, ome_comparison
from .schemas import (
    AssignRequest,
    AssignResponse,
    AttitudeCorrelationRequest,
    CorrelationResultModel,
    FeaturesRequest,
    FeaturesResponse,
    LabelStreamModel,
    MpesValidateRequest,
    OmeValidateRequest,
    SynthRequest,
    SynthResponse,
    WindowFeaturesModel,
    generator_spec_from_request,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="aveid",
        version=__version__,
        description=(
            "Engagement analytics over per-frame gaze and emotion label streams: "
            "entity assignment, episode features, and validation against "
            "observational coding scales."
        ),
    )

    @app.exception_handler(AveidError)
    async def handle_domain_error(request: Request, exc: AveidError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/assign", response_model=AssignResponse)
    def assign(req: AssignRequest) -> AssignResponse:
        labels = label_pipeline(
            [p.to_core() for p in req.points], req.regions.to_core(), req.smooth_window
        )
        return AssignResponse(labels=[label.value for label in labels])

    @app.post("/features", response_model=FeaturesResponse)
    def features(req: FeaturesRequest) -> FeaturesResponse:
        rows = window_features(
            req.stream.to_core(),
            req.window_seconds,
            subject_id=req.subject,
            min_episode_frames=req.min_episode_frames,
            max_gap_frames=req.max_gap_frames,
        )
        return FeaturesResponse(
            windows=[WindowFeaturesModel.from_core(i, wf) for i, wf in enumerate(rows)]
        )

    @app.post("/validate/mpes")
    def validate_mpes(req: MpesValidateRequest) -> dict:
        report = mpes_correlation(
            [f.to_core() if f is not None else None for f in req.features],
            [s.to_core() for s in req.scores],
            method=req.method,
        )
        return report.to_json_obj()

    @app.post("/validate/ome")
    def validate_ome(req: OmeValidateRequest) -> dict:
        sessions = [
            (
                s.stream.to_core(),
                BosAnnotation(scale="OME", ome=tuple(p.to_core() for p in s.periods)),
            )
            for s in req.sessions
        ]
        result = ome_comparison(sessions, min_episode_frames=req.min_episode_frames)
        return result.to_json_obj()

    @app.post("/validate/attitude", response_model=CorrelationResultModel)
    def validate_attitude(req: AttitudeCorrelationRequest) -> CorrelationResultModel:
        result = attitude_correlation(
            [a.to_core() for a in req.attitude], req.pleasure_scores
        )
        return CorrelationResultModel(
            r=result.r,
            p_value=result.p_value,
            n=result.n,
            significance=result.significance.value,
        )

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest) -> SynthResponse:
        stream = generate(generator_spec_from_request(req))
        if req.format == "csv":
            return SynthResponse(csv=labels_csv_text(stream.records))
        return SynthResponse(stream=LabelStreamModel.from_core(stream))

    return app
