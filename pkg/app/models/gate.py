"""QFT target gate, its admissible global phases and the error functionals."""
import math
from dataclasses import dataclass

import numpy as np

from app.core.errors import (
    AmbiguousPhase,
    DimensionMismatch,
    PhaseNotAdmissible,
    UnclassifiableGate,
)
from app.models.spin import check_levels
from app.utils.linalg import hs_inner

TWO_PI = 2.0 * math.pi
PHASE_MATCH_TOL = 1e-9
AMBIGUITY_TOL = 1e-6


def qft_matrix(d: int) -> np.ndarray:
    d = check_levels(d)
    idx = np.arange(d)
    return np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)


def circular_distance(a: float, b: float) -> float:
    diff = (a - b) % TWO_PI
    return min(diff, TWO_PI - diff)


def admissible_phases(matrix: np.ndarray) -> tuple[float, list[float]]:
    """Global phases phi with det(e^{i phi} matrix) = 1.

    phi0 is the smallest solution in [0, 2 pi / d), which always lies in [0, pi].
    """
    d = matrix.shape[0]
    step = TWO_PI / d
    phi0 = ((-np.angle(np.linalg.det(matrix))) % TWO_PI) / d
    if step - phi0 < 1e-12:
        phi0 = 0.0
    return phi0, [(phi0 + k * step) % TWO_PI for k in range(d)]


def phase_set(d: int) -> tuple[float, list[float]]:
    return admissible_phases(qft_matrix(d))


def format_phases(phases: list[float], denominator: int) -> list[str]:
    """Render phases as "a*pi/b" strings sharing one denominator.

    The denominator is reduced only by a factor common to every numerator, so
    the d = 3 set reads pi/6, 5pi/6, 9pi/6.
    """
    numerators = []
    for phi in phases:
        n = phi / math.pi * denominator
        if abs(n - round(n)) > 1e-6:
            return [f"{phi:.6f}" for phi in phases]
        numerators.append(int(round(n)))
    common = denominator
    for n in numerators:
        common = math.gcd(common, n)
    common = max(common, 1)
    return [_pi_label(n // common, denominator // common) for n in numerators]


def _pi_label(numerator: int, denominator: int) -> str:
    if numerator == 0:
        return "0"
    if numerator % denominator == 0:
        whole = numerator // denominator
        return "pi" if whole == 1 else f"{whole}pi"
    head = "pi" if numerator == 1 else f"{numerator}pi"
    return head if denominator == 1 else f"{head}/{denominator}"


@dataclass(frozen=True, eq=False)
class TargetGate:
    d: int
    matrix: np.ndarray
    phi0: float
    phases: tuple[float, ...]

    @classmethod
    def qft(cls, d: int) -> "TargetGate":
        return cls.from_matrix(qft_matrix(d))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "TargetGate":
        matrix = np.asarray(matrix, dtype=complex)
        phi0, phases = admissible_phases(matrix)
        return cls(d=matrix.shape[0], matrix=matrix, phi0=phi0, phases=tuple(phases))

    def labels(self) -> list[str]:
        return format_phases(list(self.phases), 2 * self.d)

    def label(self, phi: float) -> str:
        return self.labels()[self.phase_index(phi)]

    def phase_index(self, phi: float) -> int:
        for k, candidate in enumerate(self.phases):
            if circular_distance(candidate, phi) <= PHASE_MATCH_TOL:
                return k
        raise PhaseNotAdmissible(
            f"phase {phi:.12f} is not in the admissible set of the d={self.d} target"
        )

    def overlap(self, u: np.ndarray) -> complex:
        if u.shape != self.matrix.shape:
            raise DimensionMismatch(f"gate of shape {u.shape} does not match d={self.d}")
        return hs_inner(self.matrix, u)


def gate_error(target: TargetGate, u: np.ndarray) -> float:
    """1 - |Tr(target^dagger U)|^2 / d^2, insensitive to the global phase of U."""
    tau = target.overlap(u)
    err = 1.0 - abs(tau) ** 2 / target.d**2
    return min(max(err, 0.0), 1.0)


def phase_locked_error(target: TargetGate, phi: float, u: np.ndarray) -> float:
    """1 - Re[e^{-i phi} Tr(target^dagger U)] / d; zero only at U = e^{i phi} target."""
    target.phase_index(phi)
    tau = target.overlap(u)
    return 1.0 - (np.exp(-1j * phi) * tau).real / target.d


def classify_phase(target: TargetGate, u: np.ndarray) -> tuple[float, float]:
    """Attribute U to the admissible phase nearest to arg Tr(target^dagger U)."""
    if gate_error(target, u) >= 0.5:
        raise UnclassifiableGate("gate error >= 0.5, no phase basin can be assigned")
    theta = float(np.angle(target.overlap(u)))
    ranked = sorted((circular_distance(theta, phi), phi) for phi in target.phases)
    if len(ranked) > 1 and ranked[1][0] - ranked[0][0] < AMBIGUITY_TOL:
        raise AmbiguousPhase(
            f"arg Tr = {theta:.9f} is equidistant from {ranked[0][1]:.9f} and {ranked[1][1]:.9f}"
        )
    distance, phi = ranked[0]
    return phi, distance


def locked_gate_error(target: TargetGate, phi: float, u: np.ndarray) -> float:
    """Gate error attributed to one phase class: 1 - max(0, Re[e^{-i phi} Tr] / d)^2.

    Equals gate_error when arg Tr(target^dagger U) = phi and is never smaller.
    """
    target.phase_index(phi)
    aligned = (np.exp(-1j * phi) * target.overlap(u)).real / target.d
    return min(max(1.0 - max(aligned, 0.0) ** 2, 0.0), 1.0)
