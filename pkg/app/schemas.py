from datetime import datetime
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from app.engine.plmap import PLMap
from app.engine.serialization import MAP_FORMAT, map_from_dict


# Pydantic Models
class MapDocument(BaseModel):
    format: str = Field(MAP_FORMAT, description="Map document schema version")
    degree: Literal[1, -1] = Field(..., description="+1 orientation preserving, -1 orientation reversing")
    vertices: List[Tuple[str, str]] = Field(
        ..., min_length=1,
        description="Lift vertices [x, y] as rational strings, x strictly increasing in [0,1)",
    )
    # Example value for Docs
    model_config = {
        "json_schema_extra": {
            "example": {
                "format": MAP_FORMAT,
                "degree": 1,
                "vertices": [["0", "0"], ["1/2", "1/4"]]
            }
        }
    }

    def to_plmap(self) -> PLMap:
        return map_from_dict(self.model_dump())


class DecideRequest(BaseModel):
    map: MapDocument
    group: Literal["hplus", "h"] = Field("h", description="Decide in H+ (preserving involutions) or in H")
    max_period: Optional[int] = Field(None, ge=1, description="Override of the certification period bound")
    max_iterations: Optional[int] = Field(None, ge=1, description="Override of the lift iteration budget")

    model_config = {
        "json_schema_extra": {
            "example": {
                "map": {"degree": 1, "vertices": [["0", "1/3"]]},
                "group": "h"
            }
        }
    }


class FactorRequest(BaseModel):
    map: MapDocument
    involutions: Literal[2, 3] = Field(2, description="Two involutions (decision route) or three (degree 1 only)")
    group: Literal["hplus", "h"] = Field("h", description="Group the two-involution decision runs in")
    samples: Optional[int] = Field(None, ge=1, description="Verification samples per identity")
    seed: Optional[int] = Field(None, description="Seed of the random samples")

    model_config = {
        "json_schema_extra": {
            "example": {
                "map": {"degree": 1, "vertices": [["0", "0"], ["1/2", "1/4"]]},
                "involutions": 2,
                "group": "h",
                "samples": 64
            }
        }
    }


class ReportResponse(BaseModel):
    format: str
    command: str
    status: str
    input: Dict[str, Any]
    settings: Dict[str, Any]
    results: Dict[str, Any]
    archive_id: Optional[int] = None

    model_config = {
        "json_schema_extra": {
            "example": {
                "format": "circle-report/1",
                "command": "decide",
                "status": "yes",
                "input": {"digest": "3f1c...", "degree": 1},
                "settings": {"max_period": 64, "max_iterations": 100000, "samples": 512, "seed": 0,
                             "iteration_cap": 1000000},
                "results": {"verdict": {"verdict": "yes", "group": "H", "reason": "...", "plan": {"route": "two_ii"}}}
            }
        }
    }


class ArchiveResponse(BaseModel):
    id: int
    map_digest: str
    route: str
    group: Optional[str] = None
    verdict: Optional[str] = None
    all_pass: bool
    created: datetime
    updated: datetime

    model_config = {
        "from_attributes": True,
        "json_schema_extra": {
            "example": {
                "id": 1,
                "map_digest": "3f1c...",
                "route": "rot0",
                "group": "H",
                "verdict": "yes",
                "all_pass": True,
                "created": "2026-02-15T12:30:00",
                "updated": "2026-02-15T12:30:00"
            }
        }
    }


class ArchiveDetail(ArchiveResponse):
    archive: Dict[str, Any]


class DeleteResponse(BaseModel):
    id: int
    message: str

    model_config = {
        "json_schema_extra": {
            "example": {
                "id": 1,
                "message": "Witness archive deleted successfully"
            }
        }
    }
