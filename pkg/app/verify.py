"""Built-in invariant suite run by ``qftpulse verify``."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from app.core.config import MAX_LEVELS, MIN_LEVELS
from app.models.gate import TargetGate
from app.models.spin import SpinSystem
from app.optimizer.krotov import slice_gradient
from app.optimizer.propagation import forward_trajectory, step_propagator, step_propagators
from app.schemas.optimization import GuessSpec
from app.utils.linalg import commutator, dagger, relative_residual
from app.utils.pulses import random_spline_guess

logger = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-12
DET_TOL = 1e-10
UNITARY_TOL = 1e-10
PROPAGATOR_DET_TOL = 1e-9
GRADIENT_RTOL = 1e-4
GRADIENT_STEP = 1e-2
GRADIENT_SLICES = 300000
GRADIENT_DURATION = 0.25
GRADIENT_BOUND = 0.5
GRADIENT_SAMPLES = 24
# only slices whose gradient is at least this share of the largest one are differentiated
GRADIENT_MIN_SHARE = 0.2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_operator_algebra(d: int) -> CheckResult:
    system = SpinSystem(d=d)
    ix, iy, iz = system.operators
    spin = system.spin
    worst = max(
        np.linalg.norm(commutator(ix, iy) - 1j * iz),
        np.linalg.norm(commutator(iy, iz) - 1j * ix),
        np.linalg.norm(commutator(iz, ix) - 1j * iy),
        np.linalg.norm(ix @ ix + iy @ iy + iz @ iz - spin * (spin + 1) * np.eye(d)),
        abs(np.trace(system.h0)),
    )
    return CheckResult(f"operator-algebra d={d}", worst < ALGEBRA_TOL, f"max deviation {worst:.2e}")


def check_det_closure(d: int) -> CheckResult:
    target = TargetGate.qft(d)
    worst = max(abs(np.linalg.det(np.exp(1j * phi) * target.matrix) - 1) for phi in target.phases)
    detail = f"phi0={target.labels()[0]}, max |det - 1| {worst:.2e}"
    return CheckResult(f"det-closure d={d}", worst < DET_TOL, detail)


def check_propagators(d: int, seed: int = 0, n: int = 100) -> CheckResult:
    system = SpinSystem(d=d)
    pulse = random_spline_guess(GuessSpec(n=n, seed=seed), T=2.5)
    worst_unitary = worst_det = 0.0
    for step in step_propagators(system, pulse):
        worst_unitary = max(worst_unitary, relative_residual(dagger(step) @ step, np.eye(d)))
        worst_det = max(worst_det, abs(np.linalg.det(step) - 1))
    passed = worst_unitary < UNITARY_TOL and worst_det < PROPAGATOR_DET_TOL
    detail = f"max unitarity residual {worst_unitary:.2e}, max |det - 1| {worst_det:.2e}"
    return CheckResult(f"propagators d={d}", passed, detail)


def check_gradient_identity(
    d: int,
    seed: int = 0,
    n: int = GRADIENT_SLICES,
    samples: int = GRADIENT_SAMPLES,
    rtol: float = GRADIENT_RTOL,
) -> CheckResult:
    """Central differences of |Tr(target^dagger U(T))|^2 / d^2 against the costate gradient.

    Each sample swaps one slice propagator between the cached prefix U(t_{n-1})
    and suffix U(T) U(t_n)^dagger.

    Args:
        d: Number of levels.
        seed: Seed of the random spline guess and of the sampled slices.
        n: Slice count; the formula's deviation falls off like 1/n.
        samples: Number of (control, slice) pairs differentiated.
        rtol: Largest accepted relative deviation.

    Returns:
        The check outcome with the worst relative deviation.
    """
    system, target = SpinSystem(d=d), TargetGate.qft(d)
    guess = GuessSpec(n=n, knot_stride=max(n // 10, 1), amplitude_bound=GRADIENT_BOUND, seed=seed)
    pulse = random_spline_guess(guess, T=GRADIENT_DURATION)
    ops = forward_trajectory(system, pulse).ops
    final = ops[-1]
    gradients = np.stack(slice_gradient(system, target, pulse))
    # both controls share one threshold so a nearly flat component is skipped
    candidates = np.argwhere(np.abs(gradients) >= GRADIENT_MIN_SHARE * np.max(np.abs(gradients)))
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(candidates), size=min(samples, len(candidates)), replace=False)
    worst = 0.0
    for k, slot in candidates[np.sort(picks)]:
        suffix = final @ dagger(ops[slot + 1])
        values = []
        for sign in (1.0, -1.0):
            amps = [pulse.ux[slot], pulse.uy[slot]]
            amps[k] += sign * GRADIENT_STEP
            u_final = suffix @ step_propagator(system, amps[0], amps[1], pulse.dt) @ ops[slot]
            values.append(abs(target.overlap(u_final)) ** 2 / d**2)
        numeric = (values[0] - values[1]) / (2 * GRADIENT_STEP)
        worst = max(worst, abs(numeric - gradients[k, slot]) / abs(gradients[k, slot]))
    detail = f"max relative deviation {worst:.2e} over {len(picks)} samples, {n} slices"
    return CheckResult(f"gradient-identity d={d}", worst < rtol, detail)


def check_phase_set_d3() -> CheckResult:
    expected = [math.pi / 6, 5 * math.pi / 6, 3 * math.pi / 2]
    phases = TargetGate.qft(3).phases
    worst = max(abs(a - b) for a, b in zip(phases, expected))
    return CheckResult("phase-set d=3", worst < 1e-12, ", ".join(TargetGate.qft(3).labels()))


def run_suite(
    seed: int = 0, gradient_dims: tuple[int, ...] = (2, 3, 4), gradient_slices: int = GRADIENT_SLICES
) -> list[CheckResult]:
    dims = range(MIN_LEVELS, MAX_LEVELS + 1)
    results = [check_operator_algebra(d) for d in dims]
    results += [check_det_closure(d) for d in dims]
    results.append(check_phase_set_d3())
    results += [check_propagators(d, seed) for d in dims]
    results += [check_gradient_identity(d, seed, n=gradient_slices) for d in gradient_dims]
    for result in results:
        log = logger.info if result.passed else logger.error
        log(result.line())
    return results
