import os
from functools import lru_cache

from pydantic import BaseModel, Field

ENV_PREFIX = "CIRCLE_"


class EngineSettings(BaseModel):
    max_period: int = Field(64, ge=1, description="Largest period tried when certifying a rational rotation number")
    max_iterations: int = Field(100000, ge=1, description="Lift iterations spent on the rotation number bracket")
    samples: int = Field(512, ge=1, description="Sample points per verified identity")
    seed: int = Field(0, description="Seed of the random half of every sample plan")
    iteration_cap: int = Field(1000000, ge=1, description="Unwinding cap of lazily evaluated conjugators")
    database_url: str = Field("sqlite:///./app.db", description="SQLAlchemy URL of the witness archive store")

    model_config = {
        "json_schema_extra": {
            "example": {
                "max_period": 64,
                "max_iterations": 100000,
                "samples": 512,
                "seed": 0,
                "iteration_cap": 1000000,
                "database_url": "sqlite:///./app.db"
            }
        }
    }

    @classmethod
    def from_env(cls, environ=None) -> "EngineSettings":
        """Settings with CIRCLE_* environment overrides (e.g. CIRCLE_MAX_PERIOD=32)."""
        environ = os.environ if environ is None else environ
        overrides = {name: environ[ENV_PREFIX + name.upper()]
                     for name in cls.model_fields if ENV_PREFIX + name.upper() in environ}
        return cls(**overrides)

    def public(self) -> dict:
        """Settings recorded in reports."""
        return self.model_dump(exclude={"database_url"})


@lru_cache
def get_settings() -> EngineSettings:
    return EngineSettings.from_env()
