"""Tests for piecewise-constant propagation."""
import numpy as np
import pytest

from app.core.errors import InvalidDuration, NonFiniteAmplitude, PhaseNotAdmissible
from app.models.gate import TargetGate
from app.models.spin import SpinSystem
from app.optimizer.propagation import (
    Pulse,
    backward_trajectory,
    forward_trajectory,
    step_propagator,
    step_propagators,
    terminal_costate,
)
from app.schemas.optimization import GuessSpec, OptimizationMode
from app.utils.linalg import relative_residual, unitary_exp
from app.utils.pulses import random_spline_guess


def random_pulse(n=40, T=2.0, seed=3, bound=2.0):
    return random_spline_guess(GuessSpec(n=n, knot_stride=5, amplitude_bound=bound, seed=seed), T)


class TestPulse:
    def test_basic_properties(self):
        pulse = Pulse(ux=[0.1, 0.2, 0.3, 0.4], uy=[0, 0, 0, 0], T=2.0)
        assert pulse.n == 4
        assert pulse.dt == pytest.approx(0.5)
        assert pulse.max_amplitude() == pytest.approx(0.4)

    def test_arrays_are_read_only(self):
        pulse = Pulse.zeros(3, 1.0)
        with pytest.raises(ValueError):
            pulse.ux[0] = 1.0

    @pytest.mark.parametrize("T", [0.0, -1.0, float("inf")])
    def test_invalid_duration(self, T):
        with pytest.raises(InvalidDuration):
            Pulse.zeros(3, T)

    def test_mismatched_arrays(self):
        with pytest.raises(InvalidDuration):
            Pulse(ux=[0.0, 1.0], uy=[0.0], T=1.0)

    def test_non_finite(self):
        with pytest.raises(NonFiniteAmplitude):
            Pulse(ux=[0.0, float("nan")], uy=[0.0, 0.0], T=1.0)

    def test_segment_keeps_slice_width(self):
        pulse = random_pulse(n=40, T=2.0)
        head = pulse.segment(0, 10)
        assert head.n == 10
        assert head.dt == pytest.approx(pulse.dt)


class TestForwardTrajectory:
    def test_zero_pulse_is_free_evolution(self):
        system = SpinSystem(d=3)
        trajectory = forward_trajectory(system, Pulse.zeros(25, 1.3))
        assert np.allclose(trajectory.ops[0], np.eye(3))
        assert relative_residual(trajectory.final, unitary_exp(system.h0, 1.3)) < 1e-10

    def test_constant_pulse_matches_single_exponential(self):
        system = SpinSystem(d=4)
        pulse = Pulse(ux=np.full(50, 0.7), uy=np.full(50, -0.2), T=1.5)
        h = system.h0 + 0.7 * system.ix - 0.2 * system.iy
        assert relative_residual(forward_trajectory(system, pulse).final, unitary_exp(h, 1.5)) < 1e-10

    @pytest.mark.parametrize("d", range(2, 9))
    def test_propagators_are_special_unitary(self, d):
        system = SpinSystem(d=d)
        for step in step_propagators(system, random_pulse(n=20)):
            assert np.linalg.norm(step.conj().T @ step - np.eye(d)) < 1e-10
            assert abs(np.linalg.det(step) - 1) < 1e-9

    def test_batched_steps_match_single_steps(self):
        system = SpinSystem(d=5)
        pulse = random_pulse(n=30, seed=8)
        batched = step_propagators(system, pulse)
        assert batched.shape == (30, 5, 5)
        for step, ux, uy in zip(batched, pulse.ux, pulse.uy):
            assert np.allclose(step, step_propagator(system, ux, uy, pulse.dt), atol=1e-12)

    def test_segments_compose(self):
        system = SpinSystem(d=3)
        pulse = random_pulse(n=40)
        first = forward_trajectory(system, pulse.segment(0, 15)).final
        second = forward_trajectory(system, pulse.segment(15, 40)).final
        assert relative_residual(second @ first, forward_trajectory(system, pulse).final) < 1e-10

    def test_step_rejects_non_positive_width(self):
        with pytest.raises(InvalidDuration):
            step_propagator(SpinSystem(d=2), 0.0, 0.0, 0.0)


class TestCostate:
    def test_invariant_terminal_costate(self):
        target = TargetGate.qft(3)
        u = forward_trajectory(SpinSystem(d=3), random_pulse()).final
        b = terminal_costate(target, u)
        assert np.allclose(b, target.matrix * target.overlap(u))

    def test_locked_terminal_costate(self):
        target = TargetGate.qft(3)
        phi = target.phases[1]
        b = terminal_costate(target, np.eye(3), OptimizationMode.locked(phi))
        assert np.allclose(b, np.exp(1j * phi) * target.matrix * 1.5)

    def test_locked_costate_rejects_foreign_phase(self):
        with pytest.raises(PhaseNotAdmissible):
            terminal_costate(TargetGate.qft(3), np.eye(3), OptimizationMode.locked(0.2))

    def test_backward_propagation_undoes_forward(self):
        system, target = SpinSystem(d=4), TargetGate.qft(4)
        pulse = random_pulse(n=30)
        trajectory = forward_trajectory(system, pulse)
        b_final = terminal_costate(target, trajectory.final)
        costate = backward_trajectory(system, pulse, b_final)
        assert relative_residual(costate.initial, trajectory.final.conj().T @ b_final) < 1e-10
        # the pairing Tr(B^dagger U) is conserved along the trajectory
        overlaps = [np.vdot(costate.ops[n], trajectory.ops[n]) for n in (0, 10, 30)]
        assert np.allclose(overlaps, overlaps[0])
