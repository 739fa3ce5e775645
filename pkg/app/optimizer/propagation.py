"""Piecewise-constant time evolution.

Slice n (1..N) covers (t_{n-1}, t_n] and uses the amplitudes stored at array
index n - 1. Its propagator is P_n = exp(-i H(t_n) dt).
"""
import math
from dataclasses import dataclass

import numpy as np

from app.core.errors import InvalidDuration, NonFiniteAmplitude
from app.models.gate import TargetGate
from app.models.spin import SpinSystem, total_hamiltonian
from app.schemas.optimization import OptimizationMode
from app.utils.linalg import check_square, unitary_exp


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pulse:
    ux: np.ndarray
    uy: np.ndarray
    T: float

    def __post_init__(self):
        ux, uy = _frozen(self.ux), _frozen(self.uy)
        if ux.size < 1 or ux.shape != uy.shape:
            raise InvalidDuration(
                f"pulse needs matching, non-empty amplitude arrays (got {ux.size} and {uy.size})"
            )
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidDuration(f"pulse duration must be positive and finite, got {self.T}")
        if not (np.all(np.isfinite(ux)) and np.all(np.isfinite(uy))):
            raise NonFiniteAmplitude("pulse amplitudes must be finite")
        object.__setattr__(self, "ux", ux)
        object.__setattr__(self, "uy", uy)
        object.__setattr__(self, "T", float(self.T))

    @property
    def n(self) -> int:
        return self.ux.size

    @property
    def dt(self) -> float:
        return self.T / self.n

    @classmethod
    def zeros(cls, n: int, T: float) -> "Pulse":
        return cls(ux=np.zeros(n), uy=np.zeros(n), T=T)

    def with_amplitudes(self, ux, uy) -> "Pulse":
        return Pulse(ux=ux, uy=uy, T=self.T)

    def with_duration(self, T: float) -> "Pulse":
        return Pulse(ux=self.ux, uy=self.uy, T=T)

    def segment(self, start: int, stop: int) -> "Pulse":
        """Slices [start, stop) as a pulse of their own, keeping the slice width."""
        return Pulse(ux=self.ux[start:stop], uy=self.uy[start:stop], T=(stop - start) * self.dt)

    def max_amplitude(self) -> float:
        return float(max(np.max(np.abs(self.ux)), np.max(np.abs(self.uy))))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """ops[0] = identity, ops[n] = U(t_n)."""

    ops: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.ops[-1]

    @property
    def n(self) -> int:
        return self.ops.shape[0] - 1


@dataclass(frozen=True, eq=False)
class CostateTrajectory:
    """ops[N] = B(T), ops[n-1] = P_n^dagger ops[n]."""

    ops: np.ndarray

    @property
    def initial(self) -> np.ndarray:
        return self.ops[0]


def step_propagator(system: SpinSystem, ux: float, uy: float, dt: float) -> np.ndarray:
    """Propagator of one slice held at constant amplitudes.

    Args:
        system: Spin whose drift and control operators build H.
        ux: Amplitude on I_x over the slice.
        uy: Amplitude on I_y over the slice.
        dt: Slice width in 1/q.

    Returns:
        exp(-i (H0 + ux I_x + uy I_y) dt) as a (d, d) array.
    """
    if not dt > 0:
        raise InvalidDuration(f"slice width must be positive, got {dt}")
    return unitary_exp(total_hamiltonian(system, ux, uy), dt, check=False)


def step_propagators(system: SpinSystem, pulse: Pulse) -> np.ndarray:
    """All slice propagators P_1..P_N from one batched eigendecomposition.

    Returns:
        An (N, d, d) array whose entry n - 1 is P_n.
    """
    hamiltonians = (
        system.h0
        + pulse.ux[:, None, None] * system.ix
        + pulse.uy[:, None, None] * system.iy
    )
    eigenvalues, eigenvectors = np.linalg.eigh(hamiltonians)
    phases = np.exp(-1j * eigenvalues * pulse.dt)
    return (eigenvectors * phases[:, None, :]) @ np.conj(np.swapaxes(eigenvectors, -1, -2))


def forward_trajectory(system: SpinSystem, pulse: Pulse) -> Trajectory:
    """Accumulate U(t_n) = P_n U(t_{n-1}) from U(0) = identity.

    Args:
        system: Spin the pulse drives.
        pulse: Piecewise-constant controls.

    Returns:
        Trajectory holding U(t_0)..U(t_N).
    """
    ops = np.empty((pulse.n + 1, system.d, system.d), dtype=complex)
    ops[0] = np.eye(system.d)
    for n, step in enumerate(step_propagators(system, pulse), start=1):
        ops[n] = step @ ops[n - 1]
    return Trajectory(ops=ops)


def terminal_costate(
    target: TargetGate, u_final: np.ndarray, mode: OptimizationMode | None = None
) -> np.ndarray:
    """B(T): target * Tr(target^dagger U(T)), or the fixed-phase target weighted by d/2."""
    mode = mode or OptimizationMode.invariant()
    tau = target.overlap(u_final)
    if mode.is_locked:
        target.phase_index(mode.phase)
        return np.exp(1j * mode.phase) * target.matrix * (target.d / 2.0)
    return target.matrix * tau


def backward_trajectory(
    system: SpinSystem, pulse: Pulse, b_final: np.ndarray
) -> CostateTrajectory:
    """Propagate B(T) back to t = 0 under the same slice propagators as U."""
    check_square(b_final, system.h0)
    ops = np.empty((pulse.n + 1, system.d, system.d), dtype=complex)
    ops[pulse.n] = b_final
    steps = step_propagators(system, pulse)
    for n in range(pulse.n, 0, -1):
        ops[n - 1] = steps[n - 1].conj().T @ ops[n]
    return CostateTrajectory(ops=ops)
