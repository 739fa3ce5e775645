from datetime import datetime, timezone
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

SCHEMA_VERSION = 1


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class PulseMetadata(BaseModel):
    """Everything stored next to the amplitudes of an archived pulse."""

    model_config = ConfigDict(frozen=True)

    d: int
    spin: float
    q: float = 1.0
    detuning: float = 0.0
    phase_label: Optional[str] = None
    final_error: Optional[float] = None
    seed: Optional[int] = None
    created_utc: str = Field(default_factory=utc_now)


class PulseArchive(PulseMetadata):
    schema_version: int = SCHEMA_VERSION
    T: float = Field(gt=0)
    N: int = Field(ge=1)
    ux: list[float]
    uy: list[float]
    checksum: str

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.ux) != self.N or len(self.uy) != self.N:
            raise ValueError(
                f"amplitude arrays have {len(self.ux)}/{len(self.uy)} samples, expected N={self.N}"
            )
        return self
