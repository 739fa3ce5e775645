from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.optimization import StopReason

RECORD_COLUMNS = [
    "d",
    "T",
    "phase",
    "restart",
    "seed",
    "final_error",
    "iterations",
    "stop_reason",
    "wallclock_s",
    "archive",
]
INVARIANT_LABEL = "invariant"


class SweepRecord(BaseModel):
    """Outcome of one (d, T, phase, restart) optimization."""

    model_config = ConfigDict(frozen=True)

    d: int
    T: float
    phase_label: str = INVARIANT_LABEL
    restart_index: int = Field(ge=0)
    seed: int
    final_error: float = Field(ge=0.0, le=1.0)
    iterations: int = Field(ge=1)
    stop_reason: StopReason
    wallclock_seconds: float = 0.0
    pulse_archive_path: Optional[str] = None
    # post-hoc phase class of a phase-invariant run; not part of the CSV columns
    classified_phase: Optional[str] = None

    def to_row(self) -> dict:
        return {
            "d": self.d,
            "T": repr(self.T),
            "phase": self.phase_label,
            "restart": self.restart_index,
            "seed": self.seed,
            "final_error": repr(self.final_error),
            "iterations": self.iterations,
            "stop_reason": self.stop_reason.value,
            "wallclock_s": f"{self.wallclock_seconds:.3f}",
            "archive": self.pulse_archive_path or "",
        }

    @classmethod
    def from_row(cls, row: dict) -> "SweepRecord":
        return cls(
            d=int(row["d"]),
            T=float(row["T"]),
            phase_label=row["phase"],
            restart_index=int(row["restart"]),
            seed=int(row["seed"]),
            final_error=float(row["final_error"]),
            iterations=int(row["iterations"]),
            stop_reason=StopReason(row["stop_reason"]),
            wallclock_seconds=float(row["wallclock_s"] or 0.0),
            pulse_archive_path=row["archive"] or None,
        )


class EstimateMethod(str, Enum):
    grid = "grid"
    pft_refined = "pft-refined"


class MinTimeEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: int
    phase_label: str
    threshold: float = 1e-5
    T_min: float
    T_fail: float
    T_pass: float
    method: EstimateMethod
    record: Optional[SweepRecord] = None

    @model_validator(mode="after")
    def check_bracket(self):
        if not (self.T_fail < self.T_min <= self.T_pass):
            raise ValueError(
                f"bracket violated: T_fail={self.T_fail} T_min={self.T_min} T_pass={self.T_pass}"
            )
        return self

    @property
    def bracketing(self) -> tuple[float, float]:
        return self.T_fail, self.T_pass


class CurvePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    T: float
    best_error: float
    record: Optional[SweepRecord] = None


class MinTimeRow(BaseModel):
    """One point of the minimum-time versus dimension study."""

    d: int
    parity: str
    phase_label: str
    estimate: Optional[MinTimeEstimate] = None
    failure: Optional[str] = None
