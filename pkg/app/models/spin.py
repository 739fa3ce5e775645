"""Spin-I operators and the rotating-frame quadrupole Hamiltonian.

Basis ordering is m = I, I-1, ..., -I (row 0 is m = I), so Iz = diag(I, ..., -I).
Amplitudes are in units of q and times in units of 1/q.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from app.core.config import MAX_LEVELS, MIN_LEVELS
from app.core.errors import NonFiniteAmplitude, UnsupportedDimension


def check_levels(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < MIN_LEVELS or d > MAX_LEVELS:
        raise UnsupportedDimension(
            f"unsupported dimension d={d} (supported: {MIN_LEVELS}..{MAX_LEVELS})"
        )
    return int(d)


def spin_operators(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Ix, Iy, Iz) for spin I = (d - 1) / 2 built from the ladder operators."""
    d = check_levels(d)
    spin = (d - 1) / 2
    m = spin - np.arange(d)
    # <m+1| I+ |m> = sqrt(I(I+1) - m(m+1)) sits on the first superdiagonal
    raise_elems = np.sqrt(spin * (spin + 1) - m[1:] * (m[1:] + 1))
    i_plus = np.diag(raise_elems, k=1).astype(complex)
    i_minus = i_plus.conj().T
    ix = 0.5 * (i_plus + i_minus)
    iy = -0.5j * (i_plus - i_minus)
    iz = np.diag(m).astype(complex)
    return ix, iy, iz


@dataclass(frozen=True)
class SpinSystem:
    d: int
    q: float = 1.0
    detuning: float = 0.0
    spin: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "d", check_levels(self.d))
        if not (math.isfinite(self.q) and math.isfinite(self.detuning)):
            raise NonFiniteAmplitude("q and detuning must be finite")
        object.__setattr__(self, "spin", (self.d - 1) / 2)

    @cached_property
    def operators(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return spin_operators(self.d)

    @property
    def ix(self) -> np.ndarray:
        return self.operators[0]

    @property
    def iy(self) -> np.ndarray:
        return self.operators[1]

    @property
    def iz(self) -> np.ndarray:
        return self.operators[2]

    @property
    def controls(self) -> tuple[np.ndarray, np.ndarray]:
        return self.ix, self.iy

    @cached_property
    def h0(self) -> np.ndarray:
        return drift_hamiltonian(self)

    def describe(self) -> dict:
        return {"d": self.d, "spin": self.spin, "q": self.q, "detuning": self.detuning}


def drift_hamiltonian(system: SpinSystem) -> np.ndarray:
    """detuning * Iz + q * (Iz^2 - I(I+1)/3), diagonal in the computational basis."""
    iz = system.iz
    casimir = system.spin * (system.spin + 1)
    quadrupole = iz @ iz - (casimir / 3.0) * np.eye(system.d)
    return system.detuning * iz + system.q * quadrupole


def total_hamiltonian(system: SpinSystem, ux: float, uy: float) -> np.ndarray:
    if not (math.isfinite(ux) and math.isfinite(uy)):
        raise NonFiniteAmplitude(f"non-finite control amplitude ux={ux}, uy={uy}")
    return system.h0 + ux * system.ix + uy * system.iy
