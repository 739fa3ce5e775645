"""Tests for spin operators and the quadrupole Hamiltonian."""
import numpy as np
import pytest

from app.core.errors import NonFiniteAmplitude, UnsupportedDimension
from app.models.spin import SpinSystem, spin_operators, total_hamiltonian
from app.utils.linalg import commutator

DIMS = range(2, 9)


class TestSpinOperators:
    def test_spin_half(self):
        ix, iy, iz = spin_operators(2)
        assert np.allclose(ix, [[0, 0.5], [0.5, 0]])
        assert np.allclose(iy, [[0, -0.5j], [0.5j, 0]])
        assert np.allclose(iz, np.diag([0.5, -0.5]))

    @pytest.mark.parametrize("d", DIMS)
    def test_commutation_relations(self, d):
        ix, iy, iz = spin_operators(d)
        assert np.linalg.norm(commutator(ix, iy) - 1j * iz) < 1e-12
        assert np.linalg.norm(commutator(iy, iz) - 1j * ix) < 1e-12
        assert np.linalg.norm(commutator(iz, ix) - 1j * iy) < 1e-12

    @pytest.mark.parametrize("d", DIMS)
    def test_casimir(self, d):
        ix, iy, iz = spin_operators(d)
        spin = (d - 1) / 2
        casimir = ix @ ix + iy @ iy + iz @ iz
        assert np.linalg.norm(casimir - spin * (spin + 1) * np.eye(d)) < 1e-12

    @pytest.mark.parametrize("d", DIMS)
    def test_hermitian(self, d):
        for op in spin_operators(d):
            assert np.allclose(op, op.conj().T)

    @pytest.mark.parametrize("d", [1, 9, 0])
    def test_unsupported_dimension(self, d):
        with pytest.raises(UnsupportedDimension, match="unsupported dimension"):
            spin_operators(d)


class TestSpinSystem:
    @pytest.mark.parametrize("d", DIMS)
    def test_drift_is_traceless_and_diagonal(self, d):
        h0 = SpinSystem(d=d).h0
        assert abs(np.trace(h0)) < 1e-12
        assert np.allclose(h0, np.diag(np.diag(h0)))

    def test_spin_one_levels(self):
        system = SpinSystem(d=3, q=2.0)
        assert system.spin == 1.0
        assert np.allclose(system.h0, 2.0 * np.diag([1 / 3, -2 / 3, 1 / 3]))

    def test_detuning_adds_zeeman_term(self):
        plain, detuned = SpinSystem(d=4), SpinSystem(d=4, detuning=0.3)
        assert np.allclose(detuned.h0 - plain.h0, 0.3 * plain.iz)

    def test_spin_half_has_no_quadrupole_splitting(self):
        assert np.allclose(SpinSystem(d=2).h0, 0)

    def test_total_hamiltonian(self):
        system = SpinSystem(d=3)
        h = total_hamiltonian(system, 0.5, -1.5)
        assert np.allclose(h, system.h0 + 0.5 * system.ix - 1.5 * system.iy)
        assert np.allclose(h, h.conj().T)

    def test_non_finite_amplitude(self):
        with pytest.raises(NonFiniteAmplitude):
            total_hamiltonian(SpinSystem(d=3), float("nan"), 0.0)

    def test_describe(self):
        assert SpinSystem(d=5).describe() == {"d": 5, "spin": 2.0, "q": 1.0, "detuning": 0.0}
