from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import MAX_LEVELS, MIN_LEVELS


def default_grid() -> list[float]:
    return [round(0.5 * k, 10) for k in range(1, 25)]


class PhaseModeChoice(str, Enum):
    invariant = "invariant"
    per_phase = "per-phase"
    auto = "auto"


class Study(str, Enum):
    error_curve = "error-curve"
    min_time = "min-time"


class NPolicy(BaseModel):
    """Slice count per dimension: small_n up to cutoff_d, large_n above."""

    model_config = ConfigDict(frozen=True)

    small_n: int = Field(default=100, ge=1)
    large_n: int = Field(default=200, ge=1)
    cutoff_d: int = 5

    def slices_for(self, d: int) -> int:
        return self.small_n if d <= self.cutoff_d else self.large_n


class SweepManifest(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    d_list: list[int] = Field(min_length=1)
    T_grid: list[float] = Field(default_factory=default_grid, min_length=1)
    study: Study = Study.error_curve
    phase_mode: PhaseModeChoice = PhaseModeChoice.auto
    restarts: int = Field(default=30, ge=1)
    max_iters: int = Field(default=10000, ge=1)
    refine_factor: int = Field(default=10, ge=1)
    lambda_over_dt: float = Field(default=200.0, gt=0)
    epsilon: float = Field(default=1e-10, gt=0)
    N_policy: NPolicy = NPolicy()
    knot_stride: int = Field(default=10, ge=1)
    amplitude_bound: float = Field(default=10.0, gt=0)
    threshold: float = Field(default=1e-5, gt=0, lt=1)
    refine_steps: list[float] = Field(default_factory=lambda: [0.1, 0.02])
    pft_seed: bool = True
    per_phase_max_d: int = 4
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    out_dir: str | None = None

    @field_validator("d_list")
    @classmethod
    def check_dims(cls, value: list[int]) -> list[int]:
        for d in value:
            if d < MIN_LEVELS or d > MAX_LEVELS:
                raise ValueError(f"unsupported dimension d={d}")
        return value

    @model_validator(mode="after")
    def check_grid(self):
        if any(t <= 0 for t in self.T_grid) or self.T_grid != sorted(self.T_grid):
            raise ValueError("T_grid must be positive and ascending")
        if any(step <= 0 for step in self.refine_steps):
            raise ValueError("refine_steps must be positive")
        return self

    def run_settings(self, d: int) -> "RunSettings":
        return RunSettings(
            n=self.N_policy.slices_for(d),
            lambda_over_dt=self.lambda_over_dt,
            epsilon=self.epsilon,
            max_iters=self.max_iters,
            refine_factor=self.refine_factor,
            knot_stride=self.knot_stride,
            amplitude_bound=self.amplitude_bound,
            threshold=self.threshold,
            refine_steps=self.refine_steps,
            pft_seed=self.pft_seed,
        )

    def modes_for(self, d: int) -> list[str]:
        """Phase modes to study for d: "invariant" and/or "per-phase"."""
        if self.phase_mode == PhaseModeChoice.invariant:
            return ["invariant"]
        if self.phase_mode == PhaseModeChoice.per_phase:
            return ["per-phase"]
        if d <= self.per_phase_max_d:
            return ["invariant", "per-phase"]
        return ["invariant"]


class RunSettings(BaseModel):
    """Per-dimension knobs the runner needs to build guesses and Krotov configs."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=100, ge=1)
    lambda_over_dt: float = Field(default=200.0, gt=0)
    epsilon: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=10000, ge=1)
    refine_factor: int = Field(default=10, ge=1)
    knot_stride: int = Field(default=10, ge=1)
    amplitude_bound: float = Field(default=10.0, gt=0)
    threshold: float = Field(default=1e-5, gt=0, lt=1)
    refine_steps: list[float] = Field(default_factory=lambda: [0.1, 0.02])
    pft_seed: bool = True
