from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModeKind(str, Enum):
    invariant = "invariant"
    locked = "locked"


class StopReason(str, Enum):
    converged = "converged"
    max_iters = "max-iters"
    stalled = "stalled"
    diverged = "diverged"


class OptimizationMode(BaseModel):
    """Phase-invariant fidelity, or fidelity locked to one admissible global phase."""

    model_config = ConfigDict(frozen=True)

    kind: ModeKind = ModeKind.invariant
    phase: Optional[float] = None

    @model_validator(mode="after")
    def check_phase(self):
        if self.kind == ModeKind.locked and self.phase is None:
            raise ValueError("a phase-locked mode needs a phase")
        if self.kind == ModeKind.invariant and self.phase is not None:
            raise ValueError("a phase-invariant mode takes no phase")
        return self

    @classmethod
    def invariant(cls) -> "OptimizationMode":
        return cls()

    @classmethod
    def locked(cls, phase: float) -> "OptimizationMode":
        return cls(kind=ModeKind.locked, phase=phase)

    @property
    def is_locked(self) -> bool:
        return self.kind == ModeKind.locked


class KrotovConfig(BaseModel):
    """Penalty weight, stopping rule and mode of one Krotov run.

    ``lambda`` is an absolute weight; use ``from_lambda_over_dt`` to quote it
    in multiples of the slice width.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: float = Field(alias="lambda", gt=0)
    epsilon: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=10000, ge=1)
    mode: OptimizationMode = OptimizationMode()

    @classmethod
    def from_lambda_over_dt(cls, lambda_over_dt: float, dt: float, **kwargs) -> "KrotovConfig":
        return cls(lambda_=lambda_over_dt * dt, **kwargs)


class GuessSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    knot_stride: int = Field(default=10, ge=1)
    amplitude_bound: float = Field(default=10.0, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_stride(self):
        if self.knot_stride > self.n:
            raise ValueError(f"knot_stride {self.knot_stride} exceeds slice count {self.n}")
        return self
