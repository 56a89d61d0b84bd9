import json
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from fastapi_pagination import Page
from fastapi_pagination.ext.sqlalchemy import paginate
from sqlalchemy.orm import Session

from app import services
from app.config import EngineSettings, get_settings
from app.db.database import get_db
from app.db.models import WitnessArchive
from app.engine.errors import EngineError
from app.engine.serialization import witness_from_dict
from app.routers.maps import engine_errors
from app.schemas import ArchiveDetail, ArchiveResponse, DeleteResponse, ReportResponse

router = APIRouter(prefix="/archives", tags=["archives"])


def _get(db: Session, id: int) -> WitnessArchive:
    record = db.query(WitnessArchive).filter(WitnessArchive.id == id).first()
    if record is None:
        raise HTTPException(status_code=404, detail="Witness archive not found")
    return record


@router.get("", response_model=Page[ArchiveResponse])
def list_archives(
    route: Optional[str] = Query(
        default=None,
        description="Filter archives by witness route",
        max_length=32
    ),
    all_pass: Optional[bool] = Query(
        default=None,
        description="Filter archives by last verification outcome",
    ),
    db: Session = Depends(get_db)
):
    """Return paginated witness archives filtered by query params, newest first"""
    query = db.query(WitnessArchive)
    if route is not None:
        query = query.filter(WitnessArchive.route == route)
    if all_pass is not None:
        query = query.filter(WitnessArchive.all_pass == all_pass)
    query = query.order_by(WitnessArchive.created.desc(), WitnessArchive.id.desc())
    return paginate(query)


@router.get("/{id}", response_model=ArchiveDetail)
def get_archive(id: int, db: Session = Depends(get_db)):
    """Retrieve a witness archive with its full document"""
    record = _get(db, id)
    return ArchiveDetail(
        **ArchiveResponse.model_validate(record).model_dump(),
        archive=json.loads(record.archive),
    )


@router.post("/{id}/verify", response_model=ReportResponse)
def verify_archive(id: int, db: Session = Depends(get_db), settings: EngineSettings = Depends(get_settings)):
    """Reload a stored witness and re-run exact verification"""
    record = _get(db, id)
    try:
        outcome = services.verify(witness_from_dict(json.loads(record.archive)), None, settings)
    except EngineError as exc:
        raise engine_errors(exc) from exc
    record.all_pass = outcome.status == "pass"
    db.commit()
    return {**outcome.report, "archive_id": id}


@router.delete("/{id}", response_model=DeleteResponse)
def delete_archive(id: int, db: Session = Depends(get_db)):
    """Delete a witness archive by id"""
    rows_deleted = db.query(WitnessArchive).filter(WitnessArchive.id == id).delete()
    db.commit()

    if rows_deleted == 0:
        raise HTTPException(status_code=404, detail="Witness archive not found")

    return DeleteResponse(id=id, message="Witness archive deleted successfully")
