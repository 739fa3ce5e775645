from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.optimization import GuessSpec, KrotovConfig, StopReason


class RestartJob(BaseModel):
    """Everything a worker needs to run one restart; JSON-serializable."""

    model_config = ConfigDict(frozen=True)

    d: int
    q: float = 1.0
    detuning: float = 0.0
    T: float = Field(gt=0)
    restart_index: int = Field(ge=0)
    guess: GuessSpec
    config: KrotovConfig
    # amplitudes of a seeded (continuation or refinement) start; random guess when absent
    initial_ux: Optional[list[float]] = None
    initial_uy: Optional[list[float]] = None


class RestartOutcome(BaseModel):
    restart_index: int
    seed: int
    T: float
    final_error: float = 1.0
    mode_error: float = 1.0
    iterations: int = 1
    stop_reason: StopReason = StopReason.diverged
    classified_phase: Optional[str] = None
    ux: Optional[list[float]] = None
    uy: Optional[list[float]] = None
    wallclock_seconds: float = 0.0
    failure: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.failure is not None
