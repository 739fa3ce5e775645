import logging
import time
from typing import Callable

import numpy as np

from app.core.errors import QftPulseError
from app.models.gate import TargetGate, classify_phase, gate_error, locked_gate_error
from app.models.spin import SpinSystem
from app.optimizer.krotov import OptimizationTrace, optimize
from app.optimizer.propagation import Pulse
from app.schemas.jobs import RestartJob, RestartOutcome
from app.schemas.optimization import KrotovConfig, OptimizationMode
from app.utils.pulses import random_spline_guess

logger = logging.getLogger(__name__)

Optimizer = Callable[[SpinSystem, TargetGate, Pulse, KrotovConfig], OptimizationTrace]


def initial_pulse(job: RestartJob) -> Pulse:
    """The job's explicit amplitudes when given, otherwise its spline guess."""
    if job.initial_ux is not None and job.initial_uy is not None:
        return Pulse(ux=job.initial_ux, uy=job.initial_uy, T=job.T)
    return random_spline_guess(job.guess, job.T)


def recorded_error(target: TargetGate, mode: OptimizationMode, u: np.ndarray) -> float:
    """Error kept in the records: the gate error, attributed to the locked phase if any."""
    if mode.is_locked:
        return locked_gate_error(target, mode.phase, u)
    return gate_error(target, u)


def classified_label(target: TargetGate, trace: OptimizationTrace) -> str | None:
    # None when the final gate sits in no phase basin
    try:
        phi, _ = classify_phase(target, trace.final_unitary)
    except QftPulseError:
        return None
    return target.label(phi)


def execute_restart(job: RestartJob, optimizer: Optimizer = optimize) -> RestartOutcome:
    """Run one restart; failures are reported in the outcome, not raised."""
    started = time.perf_counter()
    system = SpinSystem(d=job.d, q=job.q, detuning=job.detuning)
    target = TargetGate.qft(job.d)
    try:
        trace = optimizer(system, target, initial_pulse(job), job.config)
    except QftPulseError as exc:
        logger.error(f"Restart {job.restart_index} (seed {job.guess.seed}) failed: {exc.detail}")
        return RestartOutcome(
            restart_index=job.restart_index,
            seed=job.guess.seed,
            T=job.T,
            wallclock_seconds=time.perf_counter() - started,
            failure=exc.detail,
        )
    return RestartOutcome(
        restart_index=job.restart_index,
        seed=job.guess.seed,
        T=job.T,
        final_error=recorded_error(target, job.config.mode, trace.final_unitary),
        mode_error=trace.final_error,
        iterations=max(trace.iterations, 1),
        stop_reason=trace.stop_reason,
        classified_phase=classified_label(target, trace),
        ux=[float(x) for x in trace.final_pulse.ux],
        uy=[float(x) for x in trace.final_pulse.uy],
        wallclock_seconds=time.perf_counter() - started,
    )
