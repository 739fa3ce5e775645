"""Multi-restart optimization, error-versus-duration curves and minimum-time search.

Every stochastic choice derives from one integer seed: a cell (d, T, phase)
gets its base seed from ``cell_seed`` and restart i of that cell uses
base + i. The best restart is picked by (final_error, seed), so sequential
and dispatched execution select the same run.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from kombu.exceptions import OperationalError

from app.core.celery_app import celery_app  # noqa: F401  binds run_restart to the configured app
from app.core.errors import InvalidConfig, NoPassingPoint, OptimizationFailed, QftPulseError
from app.experiments.jobs import Optimizer, execute_restart
from app.experiments.storage import RecordStore, write_curve_dataset, write_min_time_dataset
from app.models.gate import TargetGate
from app.models.spin import SpinSystem
from app.optimizer.krotov import optimize
from app.optimizer.propagation import Pulse
from app.schemas.archive import PulseMetadata
from app.schemas.jobs import RestartJob, RestartOutcome
from app.schemas.manifest import RunSettings, Study, SweepManifest
from app.schemas.optimization import GuessSpec, KrotovConfig, OptimizationMode
from app.schemas.records import (
    INVARIANT_LABEL,
    CurvePoint,
    EstimateMethod,
    MinTimeEstimate,
    MinTimeRow,
    SweepRecord,
)
from app.tasks.optimize_tasks import run_restart
from app.utils.pulses import pft_continue

logger = logging.getLogger(__name__)

UNCLASSIFIED_LABEL = "unclassified"
REFINED_TAG = "refined"


def cell_seed(seed: int, d: int, T: float, phase_index: int) -> int:
    """Base seed of the (d, T, phase) cell, derived from the manifest seed."""
    sequence = np.random.SeedSequence([seed, d, int(round(T * 1e6)), phase_index])
    return int(sequence.generate_state(1, np.uint32)[0])


def parity(d: int) -> str:
    return "odd" if d % 2 else "even"


def mode_label(target: TargetGate, mode: OptimizationMode) -> str:
    return target.label(mode.phase) if mode.is_locked else INVARIANT_LABEL


def mode_index(target: TargetGate, mode: OptimizationMode) -> int:
    # 0 for the phase-invariant mode, k + 1 for the k-th admissible phase
    return target.phase_index(mode.phase) + 1 if mode.is_locked else 0


def study_modes(target: TargetGate, choice: str) -> list[OptimizationMode]:
    if choice == "per-phase":
        return [OptimizationMode.locked(phi) for phi in target.phases]
    return [OptimizationMode.invariant()]


def outcome_pulse(outcome: RestartOutcome) -> Pulse:
    return Pulse(ux=outcome.ux, uy=outcome.uy, T=outcome.T)


@dataclass(frozen=True, eq=False)
class RestartResult:
    best: SweepRecord
    all: list[SweepRecord]
    best_pulse: Pulse


@dataclass(frozen=True, eq=False)
class CurveSample:
    T: float
    best_error: float
    record: Optional[SweepRecord] = None
    pulse: Optional[Pulse] = None

    @property
    def point(self) -> CurvePoint:
        return CurvePoint(T=self.T, best_error=self.best_error, record=self.record)


@dataclass
class SweepSummary:
    curves: dict[tuple[int, str], list[CurvePoint]] = field(default_factory=dict)
    min_times: list[MinTimeRow] = field(default_factory=list)
    datasets: list[Path] = field(default_factory=list)


class ExperimentRunner:
    """Runs restarts, curves and minimum-time searches for one set of run settings.

    Restarts go to Celery when more than one worker is configured and the
    real optimizer is in use; otherwise they run in-process in seed order.
    Every finished restart is appended to the record store, if one is given.
    """

    def __init__(
        self,
        settings: RunSettings,
        store: Optional[RecordStore] = None,
        workers: int = 1,
        optimizer: Optimizer = optimize,
    ):
        self.settings = settings
        self.store = store
        self.workers = workers
        self.optimizer = optimizer

    def config_for(self, T: float, n: int, mode: OptimizationMode, refine: bool = False) -> KrotovConfig:
        budget = self.settings.max_iters * (self.settings.refine_factor if refine else 1)
        return KrotovConfig.from_lambda_over_dt(
            self.settings.lambda_over_dt,
            T / n,
            epsilon=self.settings.epsilon,
            max_iters=budget,
            mode=mode,
        )

    def make_job(
        self,
        system: SpinSystem,
        T: float,
        mode: OptimizationMode,
        index: int,
        seed: int,
        initial: Optional[Pulse] = None,
        refine: bool = False,
    ) -> RestartJob:
        """Describe one restart so it can run here or on a worker.

        Args:
            system: Spin being driven.
            T: Pulse duration in 1/q.
            mode: Phase-invariant or locked objective.
            index: Restart index within the cell.
            seed: Seed of the spline guess.
            initial: Start from this pulse instead of a random guess.
            refine: Use the refinement iteration budget.

        Returns:
            A JSON-serializable job.
        """
        n = initial.n if initial is not None else self.settings.n
        return RestartJob(
            d=system.d,
            q=system.q,
            detuning=system.detuning,
            T=T,
            restart_index=index,
            guess=GuessSpec(
                n=n,
                knot_stride=min(self.settings.knot_stride, n),
                amplitude_bound=self.settings.amplitude_bound,
                seed=seed,
            ),
            config=self.config_for(T, n, mode, refine),
            initial_ux=None if initial is None else [float(x) for x in initial.ux],
            initial_uy=None if initial is None else [float(x) for x in initial.uy],
        )

    def dispatch(self, jobs: list[RestartJob]) -> list[RestartOutcome]:
        """Run jobs and return their outcomes in job order.

        Raises:
            OptimizationFailed: The Celery broker cannot be reached.
        """
        if self.workers > 1 and len(jobs) > 1 and self.optimizer is optimize:
            logger.info(f"Dispatching {len(jobs)} restarts to Celery")
            try:
                pending = [run_restart.apply_async(args=[job.model_dump(mode="json")]) for job in jobs]
                return [RestartOutcome.model_validate(result.get()) for result in pending]
            except OperationalError as exc:
                raise OptimizationFailed(f"cannot reach the Celery broker: {exc}") from exc
        return [execute_restart(job, self.optimizer) for job in jobs]

    def to_record(
        self,
        system: SpinSystem,
        target: TargetGate,
        mode: OptimizationMode,
        outcome: RestartOutcome,
        tag: str = "",
    ) -> SweepRecord:
        label = mode_label(target, mode)
        classified = None if mode.is_locked else (outcome.classified_phase or UNCLASSIFIED_LABEL)
        archive = None
        if self.store is not None and not outcome.failed:
            metadata = PulseMetadata(
                **system.describe(),
                phase_label=classified or label,
                final_error=outcome.final_error,
                seed=outcome.seed,
            )
            archive = self.store.save_archive(outcome_pulse(outcome), metadata, label, tag)
        return SweepRecord(
            d=system.d,
            T=outcome.T,
            phase_label=label,
            restart_index=outcome.restart_index,
            seed=outcome.seed,
            final_error=1.0 if outcome.failed else outcome.final_error,
            iterations=max(outcome.iterations, 1),
            stop_reason=outcome.stop_reason,
            wallclock_seconds=outcome.wallclock_seconds,
            pulse_archive_path=archive,
            classified_phase=classified,
        )

    def multi_restart(
        self,
        system: SpinSystem,
        target: TargetGate,
        T: float,
        mode: OptimizationMode,
        restarts: int,
        seed0: int,
        initial: Optional[Pulse] = None,
    ) -> RestartResult:
        """Run restarts with seeds seed0 + i, then refine the best one.

        With ``initial`` a single continuation-seeded run replaces the random
        restarts.
        """
        if restarts < 1:
            raise InvalidConfig(f"restarts must be >= 1, got {restarts}")
        if initial is not None:
            jobs = [self.make_job(system, T, mode, 0, seed0, initial=initial)]
        else:
            jobs = [self.make_job(system, T, mode, i, seed0 + i) for i in range(restarts)]
        outcomes = self.dispatch(jobs)
        records = [self.to_record(system, target, mode, o) for o in outcomes]
        label = mode_label(target, mode)
        succeeded = [(o, r) for o, r in zip(outcomes, records) if not o.failed]
        if not succeeded:
            self._persist(records)
            raise OptimizationFailed(
                f"all {len(outcomes)} restarts failed at d={system.d} T={T:g} ({label})"
            )
        best_outcome, best_record = min(succeeded, key=lambda pair: (pair[1].final_error, pair[1].seed))
        logger.info(
            f"d={system.d} T={T:g} {label}: best of {len(outcomes)} restarts is seed "
            f"{best_record.seed} with error {best_record.final_error:.3e}, refining"
        )
        refine_job = self.make_job(
            system,
            T,
            mode,
            best_outcome.restart_index,
            best_outcome.seed,
            initial=outcome_pulse(best_outcome),
            refine=True,
        )
        refined = execute_restart(refine_job, self.optimizer)
        persisted = list(records)
        best, best_pulse = best_record, outcome_pulse(best_outcome)
        if refined.failed or refined.final_error > best_outcome.final_error:
            logger.warning(f"Refinement of seed {best_outcome.seed} did not improve, keeping the restart")
        else:
            merged = refined.model_copy(
                update={
                    "iterations": best_outcome.iterations + refined.iterations,
                    "wallclock_seconds": best_outcome.wallclock_seconds + refined.wallclock_seconds,
                }
            )
            best = self.to_record(system, target, mode, merged, tag=REFINED_TAG)
            best_pulse = outcome_pulse(merged)
            persisted.append(best)
        self._persist(persisted)
        return RestartResult(best=best, all=records, best_pulse=best_pulse)

    def _persist(self, records: list[SweepRecord]) -> None:
        if self.store is not None:
            self.store.extend(records)

    def _sample(
        self,
        system: SpinSystem,
        target: TargetGate,
        T: float,
        mode: OptimizationMode,
        restarts: int,
        seed0: int,
        initial: Optional[Pulse] = None,
    ) -> CurveSample:
        try:
            result = self.multi_restart(system, target, T, mode, restarts, seed0, initial=initial)
        except OptimizationFailed as exc:
            logger.error(exc.detail)
            return CurveSample(T=T, best_error=1.0)
        return CurveSample(
            T=T, best_error=result.best.final_error, record=result.best, pulse=result.best_pulse
        )

    def curve(
        self,
        system: SpinSystem,
        target: TargetGate,
        T_grid: list[float],
        mode: OptimizationMode,
        restarts: int,
        seed: int,
        pft_seed: Optional[bool] = None,
        threshold: Optional[float] = None,
    ) -> list[CurveSample]:
        """Best error per grid point, walked from the largest T down."""
        if not T_grid or list(T_grid) != sorted(T_grid) or T_grid[0] <= 0:
            raise InvalidConfig("T_grid must be non-empty, positive and ascending")
        use_pft = self.settings.pft_seed if pft_seed is None else pft_seed
        threshold = self.settings.threshold if threshold is None else threshold
        index = mode_index(target, mode)
        label = mode_label(target, mode)
        samples: list[CurveSample] = []
        larger: Optional[CurveSample] = None
        for T in reversed(T_grid):
            seed0 = cell_seed(seed, system.d, T, index)
            if use_pft and larger is not None and larger.pulse is not None and larger.best_error < threshold:
                seeded = pft_continue(larger.pulse, larger.T - T)
                sample = self._sample(system, target, T, mode, 1, seed0, initial=seeded)
                if sample.best_error >= threshold:
                    logger.info(f"d={system.d} T={T:g} {label}: continuation missed the threshold, restarting")
                    fresh = self._sample(system, target, T, mode, restarts, seed0)
                    if fresh.best_error < sample.best_error:
                        sample = fresh
            else:
                sample = self._sample(system, target, T, mode, restarts, seed0)
            logger.info(f"d={system.d} T={T:g} {label}: best error {sample.best_error:.3e}")
            samples.append(sample)
            larger = sample
        return samples[::-1]

    def error_vs_duration(
        self,
        system: SpinSystem,
        target: TargetGate,
        T_grid: list[float],
        mode: OptimizationMode,
        restarts: int,
        seed: int,
        pft_seed: Optional[bool] = None,
    ) -> list[CurvePoint]:
        """Best error at each grid point, as plain curve points."""
        samples = self.curve(system, target, T_grid, mode, restarts, seed, pft_seed)
        return [sample.point for sample in samples]

    def min_time(
        self,
        system: SpinSystem,
        target: TargetGate,
        mode: OptimizationMode,
        T_grid: list[float],
        restarts: int,
        seed: int,
        threshold: Optional[float] = None,
        refine_steps: Optional[list[float]] = None,
    ) -> MinTimeEstimate:
        """Smallest duration whose optimized error is below the threshold.

        A coarse pass over T_grid finds the passing run at the top of the grid;
        continuation-seeded runs then step down from its smallest point by each
        refinement step in turn until one fails.
        """
        threshold = self.settings.threshold if threshold is None else threshold
        steps = self.settings.refine_steps if refine_steps is None else refine_steps
        label = mode_label(target, mode)
        samples = self.curve(system, target, T_grid, mode, restarts, seed, threshold=threshold)
        if samples[-1].best_error >= threshold:
            raise NoPassingPoint(
                f"d={system.d} {label}: error {samples[-1].best_error:.3e} at T={samples[-1].T:g} "
                f"is not below {threshold:g}; extend the grid"
            )
        top = len(samples) - 1
        while top > 0 and samples[top - 1].best_error < threshold:
            top -= 1
        passing = samples[top]
        T_fail = samples[top - 1].T if top > 0 else 0.0
        method = EstimateMethod.grid
        index = mode_index(target, mode)
        for step in steps:
            T = round(passing.T - step, 10)
            while T > T_fail + 1e-9:
                seeded = pft_continue(passing.pulse, passing.T - T)
                trial = self._sample(
                    system, target, T, mode, 1, cell_seed(seed, system.d, T, index), initial=seeded
                )
                logger.info(
                    f"d={system.d} {label}: refinement at T={T:g} gives error {trial.best_error:.3e}"
                )
                if trial.best_error >= threshold:
                    T_fail = T
                    break
                passing, method = trial, EstimateMethod.pft_refined
                T = round(T - step, 10)
        return MinTimeEstimate(
            d=system.d,
            phase_label=label,
            threshold=threshold,
            T_min=passing.T,
            T_fail=T_fail,
            T_pass=passing.T,
            method=method,
            record=passing.record,
        )


def min_time_vs_d(
    manifest: SweepManifest, store: Optional[RecordStore] = None, optimizer: Optimizer = optimize
) -> list[MinTimeRow]:
    """Minimum time per dimension and phase mode of the manifest.

    A failed search becomes a row carrying the failure instead of an estimate,
    so one bad cell does not end the sweep.
    """
    rows = []
    for d in manifest.d_list:
        system, target = SpinSystem(d=d), TargetGate.qft(d)
        runner = ExperimentRunner(manifest.run_settings(d), store, manifest.workers, optimizer)
        for choice in manifest.modes_for(d):
            for mode in study_modes(target, choice):
                label = mode_label(target, mode)
                try:
                    estimate = runner.min_time(
                        system, target, mode, manifest.T_grid, manifest.restarts, manifest.seed
                    )
                except QftPulseError as exc:
                    logger.error(f"Minimum time for d={d} {label} failed: {exc.detail}")
                    rows.append(MinTimeRow(d=d, parity=parity(d), phase_label=label, failure=exc.detail))
                    continue
                logger.info(f"d={d} {label}: T_min={estimate.T_min:g} ({estimate.method.value})")
                rows.append(MinTimeRow(d=d, parity=parity(d), phase_label=label, estimate=estimate))
    return rows


def run_manifest(
    manifest: SweepManifest, out_dir: Path, optimizer: Optimizer = optimize
) -> SweepSummary:
    """Execute the manifest's study and write records, archives and figure datasets."""
    store = RecordStore(out_dir)
    summary = SweepSummary()
    if manifest.study == Study.min_time:
        summary.min_times = min_time_vs_d(manifest, store, optimizer)
        summary.datasets.append(write_min_time_dataset(out_dir, summary.min_times))
        return summary
    for d in manifest.d_list:
        system, target = SpinSystem(d=d), TargetGate.qft(d)
        runner = ExperimentRunner(manifest.run_settings(d), store, manifest.workers, optimizer)
        for choice in manifest.modes_for(d):
            for mode in study_modes(target, choice):
                label = mode_label(target, mode)
                points = runner.error_vs_duration(
                    system, target, manifest.T_grid, mode, manifest.restarts, manifest.seed
                )
                summary.curves[(d, label)] = points
                summary.datasets.append(write_curve_dataset(out_dir, d, label, points))
    return summary
