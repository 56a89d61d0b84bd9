from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from app import services
from app.config import EngineSettings, get_settings
from app.db.database import get_db
from app.db.models import WitnessArchive
from app.engine.errors import EngineError, IterationCapExceeded, PreconditionError, RotationNumberUnknown
from app.engine.serialization import canonical_json, map_digest
from app.schemas import DecideRequest, FactorRequest, MapDocument, ReportResponse


def engine_errors(exc: EngineError) -> HTTPException:
    """422 for unusable input, 409 when the engine refuses or cannot decide."""
    if isinstance(exc, (RotationNumberUnknown, IterationCapExceeded, PreconditionError)):
        return HTTPException(status_code=409, detail=str(exc))
    return HTTPException(status_code=422, detail=str(exc))


def _with_limits(settings: EngineSettings, **overrides) -> EngineSettings:
    return settings.model_copy(update={k: v for k, v in overrides.items() if v is not None})


# API Endpoints
router = APIRouter(prefix="/maps", tags=["maps"])


@router.post("/analyze", response_model=ReportResponse)
def analyze_map(document: MapDocument, settings: EngineSettings = Depends(get_settings)):
    """Fixed set, rotation number, minimal period and signature word of a map"""
    try:
        return services.analyze(document.to_plmap(), settings).report
    except EngineError as exc:
        raise engine_errors(exc) from exc


@router.post("/decide", response_model=ReportResponse)
def decide_map(request: DecideRequest, settings: EngineSettings = Depends(get_settings)):
    """Decide strong reversibility in H+ or H"""
    settings = _with_limits(settings, max_period=request.max_period, max_iterations=request.max_iterations)
    try:
        return services.decide(request.map.to_plmap(), request.group, settings).report
    except EngineError as exc:
        raise engine_errors(exc) from exc


@router.post("/factor", response_model=ReportResponse)
def factor_map(request: FactorRequest, db: Session = Depends(get_db),
               settings: EngineSettings = Depends(get_settings)):
    """Build and verify an involution witness; verified witnesses are archived"""
    settings = _with_limits(settings, samples=request.samples, seed=request.seed)
    try:
        f = request.map.to_plmap()
        outcome = services.factor(f, request.involutions, request.group, settings)
    except EngineError as exc:
        raise engine_errors(exc) from exc
    report = outcome.report
    if outcome.witness is None:
        return report
    verdict = report["results"].get("verdict")
    db_archive = WitnessArchive(
        map_digest=map_digest(f),
        route=outcome.witness.route.value,
        group=verdict["group"] if verdict else None,
        verdict=verdict["verdict"] if verdict else None,
        all_pass=True,
        archive=canonical_json(services.archive(outcome)),
    )
    db.add(db_archive)
    db.commit()
    db.refresh(db_archive)
    return {**report, "archive_id": db_archive.id}
