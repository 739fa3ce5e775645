"""Monotonically convergent two-field Krotov iteration for unitary targets.

Each iteration runs a forward sweep, which updates the controls u against the
costate of the previous iteration, and a backward sweep, which updates the
auxiliary controls u~ against the fresh forward trajectory. The auxiliary
controls are both the penalty reference v of the next iteration and the
Hamiltonian under which its costate is propagated.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from app.core.errors import DimensionMismatch, NonFiniteAmplitude
from app.models.gate import TargetGate, gate_error, phase_locked_error
from app.models.spin import SpinSystem
from app.optimizer.propagation import (
    CostateTrajectory,
    Pulse,
    Trajectory,
    backward_trajectory,
    forward_trajectory,
    step_propagator,
    step_propagators,
    terminal_costate,
)
from app.schemas.optimization import KrotovConfig, OptimizationMode, StopReason

logger = logging.getLogger(__name__)

STALL_TOL = 1e-9
DIVERGENCE_BOUND = 1e6


@dataclass(frozen=True, eq=False)
class OptimizationTrace:
    error_history: list[float]
    final_pulse: Pulse
    final_error: float
    final_unitary: np.ndarray
    iterations: int
    stop_reason: StopReason
    reference_controls: Pulse
    initial_error: float
    rejected_error: Optional[float] = None


@dataclass(frozen=True, eq=False)
class KrotovState:
    system: SpinSystem
    target: TargetGate
    config: KrotovConfig
    pulse: Pulse
    trajectory: Trajectory
    reference: Pulse
    reference_steps: np.ndarray
    costate: CostateTrajectory
    error: float


def mode_error(target: TargetGate, mode: OptimizationMode, u_final: np.ndarray) -> float:
    if mode.is_locked:
        return phase_locked_error(target, mode.phase, u_final)
    return gate_error(target, u_final)


def update_slice(
    u_prev: float, b_n: np.ndarray, u_n: np.ndarray, hk: np.ndarray, lam: float
) -> float:
    """One control sample moved along the fidelity gradient.

    Args:
        u_prev: Reference amplitude the penalty pulls towards.
        b_n: Costate B(t_n).
        u_n: Propagator U(t_n).
        hk: Control operator I_x or I_y.
        lam: Penalty weight; larger values take smaller steps.

    Returns:
        u_prev + Im Tr(b_n^dagger hk u_n) / lam.
    """
    # Ascent direction: dF/du_k(t_n) is proportional to +Im Tr(B^dagger H_k U)
    return u_prev + float(np.imag(np.vdot(b_n, hk @ u_n))) / lam


def _guard(ux: float, uy: float) -> None:
    if not (abs(ux) <= DIVERGENCE_BOUND and abs(uy) <= DIVERGENCE_BOUND):
        raise NonFiniteAmplitude(
            f"control amplitude diverged (ux={ux:.3e}, uy={uy:.3e}); lambda is too small for this dt"
        )


def initial_state(
    system: SpinSystem, target: TargetGate, initial: Pulse, config: KrotovConfig
) -> KrotovState:
    """Propagate the guess once forward and once backward; u~ starts equal to it."""
    if target.d != system.d:
        raise DimensionMismatch(f"target has d={target.d} but the spin system has d={system.d}")
    if config.mode.is_locked:
        target.phase_index(config.mode.phase)
    trajectory = forward_trajectory(system, initial)
    b_final = terminal_costate(target, trajectory.final, config.mode)
    return KrotovState(
        system=system,
        target=target,
        config=config,
        pulse=initial,
        trajectory=trajectory,
        reference=initial,
        reference_steps=step_propagators(system, initial),
        costate=backward_trajectory(system, initial, b_final),
        error=mode_error(target, config.mode, trajectory.final),
    )


def forward_sweep(state: KrotovState) -> KrotovState:
    """Update u slice by slice along the new forward trajectory.

    Slice n is updated against the costate B(t_n) of the previous backward
    sweep and the trial U(t_n), which is the new U(t_{n-1}) carried across
    slice n by the reference propagator. The reference amplitudes are the
    penalty centre v.

    Args:
        state: State after ``initial_state`` or a backward sweep.

    Returns:
        The state with the new pulse, its trajectory and its error. The
        reference and costate are left untouched.

    Raises:
        NonFiniteAmplitude: An updated amplitude left the divergence bound.
    """
    system, lam = state.system, state.config.lambda_
    ix, iy = system.controls
    n_slices, dt = state.reference.n, state.reference.dt
    ux, uy = np.empty(n_slices), np.empty(n_slices)
    ops = np.empty_like(state.trajectory.ops)
    ops[0] = np.eye(system.d)
    for n in range(1, n_slices + 1):
        # U_m(t_n) carried across slice n with the reference amplitude
        trial = state.reference_steps[n - 1] @ ops[n - 1]
        b_n = state.costate.ops[n]
        ux[n - 1] = update_slice(state.reference.ux[n - 1], b_n, trial, ix, lam)
        uy[n - 1] = update_slice(state.reference.uy[n - 1], b_n, trial, iy, lam)
        _guard(ux[n - 1], uy[n - 1])
        ops[n] = step_propagator(system, ux[n - 1], uy[n - 1], dt) @ ops[n - 1]
    trajectory = Trajectory(ops=ops)
    return replace(
        state,
        pulse=state.reference.with_amplitudes(ux, uy),
        trajectory=trajectory,
        error=mode_error(state.target, state.config.mode, trajectory.final),
    )


def backward_sweep(state: KrotovState) -> KrotovState:
    """Walk back from B(T), producing the auxiliary controls u~ and their costate.

    Args:
        state: State right after a forward sweep.

    Returns:
        The state whose reference, reference propagators and costate all
        come from u~. The pulse and trajectory are unchanged.
    """
    system, lam = state.system, state.config.lambda_
    ix, iy = system.controls
    n_slices, dt = state.pulse.n, state.pulse.dt
    wx, wy = np.empty(n_slices), np.empty(n_slices)
    steps = np.empty((n_slices, system.d, system.d), dtype=complex)
    ops = np.empty_like(state.costate.ops)
    ops[n_slices] = terminal_costate(state.target, state.trajectory.final, state.config.mode)
    for n in range(n_slices, 0, -1):
        # B(t_n) is already propagated under u~ of the later slices
        u_n = state.trajectory.ops[n]
        wx[n - 1] = update_slice(state.pulse.ux[n - 1], ops[n], u_n, ix, lam)
        wy[n - 1] = update_slice(state.pulse.uy[n - 1], ops[n], u_n, iy, lam)
        _guard(wx[n - 1], wy[n - 1])
        steps[n - 1] = step_propagator(system, wx[n - 1], wy[n - 1], dt)
        ops[n - 1] = steps[n - 1].conj().T @ ops[n]
    return replace(
        state,
        reference=state.pulse.with_amplitudes(wx, wy),
        reference_steps=steps,
        costate=CostateTrajectory(ops=ops),
    )


def optimize(
    system: SpinSystem, target: TargetGate, initial: Pulse, config: KrotovConfig
) -> OptimizationTrace:
    """Run Krotov iterations until the error stops improving by epsilon.

    The best pulse seen is returned, which is the last accepted one as long as
    the error history is monotone.
    """
    state = initial_state(system, target, initial, config)
    initial_error = previous = state.error
    best_pulse, best_error, best_unitary = initial, state.error, state.trajectory.final
    history: list[float] = []
    rejected = None
    stop_reason = StopReason.max_iters
    iterations = 0
    logger.info(
        f"Krotov start d={system.d} T={initial.T:g} N={initial.n} "
        f"lambda={config.lambda_:.4g} mode={config.mode.kind.value} error={initial_error:.3e}"
    )
    for iteration in range(1, config.max_iters + 1):
        state = forward_sweep(state)
        iterations = iteration
        error = state.error
        if error - previous > STALL_TOL:
            rejected = error
            stop_reason = StopReason.stalled
            break
        history.append(error)
        logger.debug(f"iteration {iteration}: error={error:.6e}")
        if error < best_error:
            best_pulse, best_error, best_unitary = state.pulse, error, state.trajectory.final
        if previous - error < config.epsilon:
            stop_reason = StopReason.converged
            break
        state = backward_sweep(state)
        previous = error
    logger.info(
        f"Krotov stop after {iterations} iterations ({stop_reason.value}), error={best_error:.3e}"
    )
    return OptimizationTrace(
        error_history=history,
        final_pulse=best_pulse,
        final_error=best_error,
        final_unitary=best_unitary,
        iterations=iterations,
        stop_reason=stop_reason,
        reference_controls=state.reference,
        initial_error=initial_error,
        rejected_error=rejected,
    )


def fidelity(system: SpinSystem, target: TargetGate, pulse: Pulse) -> float:
    """|Tr(target^dagger U(T))|^2 / d^2."""
    tau = target.overlap(forward_trajectory(system, pulse).final)
    return abs(tau) ** 2 / target.d**2


def slice_gradient(
    system: SpinSystem, target: TargetGate, pulse: Pulse
) -> tuple[np.ndarray, np.ndarray]:
    """(2 dt / d^2) Im Tr(B(t_n)^dagger H_k U(t_n)) for k = x, y and every slice.

    Args:
        system: Spin the pulse drives.
        target: Gate whose phase-invariant fidelity is differentiated.
        pulse: Controls at which the gradient is taken.

    Returns:
        Gradients with respect to u_x and u_y, one entry per slice.
    """
    trajectory = forward_trajectory(system, pulse)
    costate = backward_trajectory(system, pulse, terminal_costate(target, trajectory.final))
    scale = 2.0 * pulse.dt / target.d**2
    forward, backward = trajectory.ops[1:], costate.ops[1:]
    grads = [
        scale * np.imag(np.sum(backward.conj() * (hk @ forward), axis=(1, 2)))
        for hk in system.controls
    ]
    return grads[0], grads[1]


def functional_terms(
    system: SpinSystem, target: TargetGate, pulse: Pulse, reference: Pulse, lam: float
) -> tuple[float, float]:
    """Fidelity term |Tr(target^dagger U(T))|^2 and penalty lam * sum (u - v)^2 dt."""
    if pulse.n != reference.n or abs(pulse.T - reference.T) > 1e-12 * pulse.T:
        raise DimensionMismatch("pulse and reference must share N and T")
    tau = target.overlap(forward_trajectory(system, pulse).final)
    penalty = lam * pulse.dt * float(
        np.sum((pulse.ux - reference.ux) ** 2) + np.sum((pulse.uy - reference.uy) ** 2)
    )
    return abs(tau) ** 2, penalty
