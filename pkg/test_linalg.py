"""Tests for the dense matrix kernel."""
import numpy as np
import pytest

from app.core.errors import DimensionMismatch, NonHermitianInput
from app.utils.linalg import (
    commutator,
    hermitian_eig,
    hs_inner,
    is_hermitian,
    relative_residual,
    unitary_exp,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


class TestHermitianEig:
    def test_diagonal_input(self):
        system = hermitian_eig(np.diag([1.0, 0.0, -1.0]).astype(complex))
        assert np.allclose(system.eigenvalues, [-1, 0, 1])
        # eigenvectors of a diagonal matrix are the unit vectors up to phase
        assert np.allclose(np.abs(system.eigenvectors), np.fliplr(np.eye(3)))

    def test_half_pauli_x_spectrum(self):
        system = hermitian_eig(PAULI_X / 2)
        assert np.allclose(system.eigenvalues, [-0.5, 0.5])

    @pytest.mark.parametrize("d", [2, 5, 8])
    def test_reconstruction_and_orthonormality(self, hermitian, d):
        h = hermitian(d)
        system = hermitian_eig(h)
        v = system.eigenvectors
        assert relative_residual(system.reconstruct(), h) < 1e-10
        assert np.linalg.norm(v.conj().T @ v - np.eye(d)) < 1e-12
        assert np.all(np.diff(system.eigenvalues) >= 0)
        assert abs(np.sum(system.eigenvalues) - np.trace(h).real) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianInput):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            hermitian_eig(np.zeros((2, 3), dtype=complex))


class TestUnitaryExp:
    def test_zero_hamiltonian_is_identity(self):
        assert np.allclose(unitary_exp(np.zeros((4, 4), dtype=complex), 1.7), np.eye(4))

    def test_diagonal_phases(self):
        u = unitary_exp(np.diag([1.0, -1.0]).astype(complex), np.pi)
        assert np.allclose(u, -np.eye(2), atol=1e-12)

    def test_random_is_unitary_and_matches_series(self, hermitian):
        h = hermitian(5)
        u = unitary_exp(h, 0.3)
        assert np.linalg.norm(u.conj().T @ u - np.eye(5)) < 1e-12

        tau = 1e-4
        series = np.eye(5) - 1j * tau * h - (tau**2 / 2) * h @ h + 1j * (tau**3 / 6) * h @ h @ h
        assert relative_residual(unitary_exp(h, tau), series) < 1e-10

    def test_composition_and_adjoint(self, hermitian):
        h = hermitian(4)
        combined = unitary_exp(h, 0.4) @ unitary_exp(h, 0.9)
        assert relative_residual(combined, unitary_exp(h, 1.3)) < 1e-10
        assert np.linalg.norm(unitary_exp(h, 0.4).conj().T - unitary_exp(h, -0.4)) < 1e-12

    def test_unchecked_path_agrees(self, hermitian):
        h = hermitian(6)
        assert np.allclose(unitary_exp(h, 0.8, check=False), unitary_exp(h, 0.8), atol=1e-13)


class TestHsInner:
    def test_identity(self):
        assert hs_inner(np.eye(3), np.eye(3)) == pytest.approx(3)

    def test_self_product_is_frobenius_norm(self, hermitian):
        a = hermitian(4) + 1j * hermitian(4)
        value = hs_inner(a, a)
        assert value.imag == pytest.approx(0, abs=1e-12)
        assert value.real == pytest.approx(np.linalg.norm(a) ** 2)

    def test_pauli_orthogonality(self):
        assert hs_inner(PAULI_X, PAULI_Y) == pytest.approx(0)

    def test_conjugate_symmetry(self, hermitian):
        a, b = hermitian(3) + 0.5j * hermitian(3), hermitian(3)
        assert hs_inner(a, b) == pytest.approx(np.conj(hs_inner(b, a)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hs_inner(np.eye(2), np.eye(3))


def test_commutator_of_paulis():
    assert np.allclose(commutator(PAULI_X, PAULI_Y), 2j * np.diag([1, -1]))


def test_relative_residual_falls_back_to_absolute():
    assert relative_residual(np.full((2, 2), 1e-3), np.zeros((2, 2))) == pytest.approx(2e-3)
    assert is_hermitian(PAULI_Y)
