"""Dense complex matrix helpers built on numpy.

Every operator in the package is a small (d <= 8) dense complex array, so
exponentials are taken through the Hermitian eigendecomposition instead of a
series or scaling-and-squaring scheme.
"""
from dataclasses import dataclass

import numpy as np

from app.core.errors import DimensionMismatch, NonHermitianInput

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigenvalues in ascending order and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def propagator(self, tau: float) -> np.ndarray:
        # exp(-i H tau) = V diag(exp(-i lambda tau)) V^dagger
        phases = np.exp(-1j * self.eigenvalues * tau)
        return (self.eigenvectors * phases) @ self.eigenvectors.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def relative_residual(a: np.ndarray, reference: np.ndarray) -> float:
    """Frobenius norm of a - reference, relative to the reference norm.

    Falls back to the absolute norm when the reference is zero.
    """
    diff = np.linalg.norm(a - reference)
    scale = np.linalg.norm(reference)
    return float(diff / scale) if scale > 0 else float(diff)


def check_square(*matrices: np.ndarray) -> int:
    shape = matrices[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {shape}")
    for m in matrices[1:]:
        if m.shape != shape:
            raise DimensionMismatch(f"shape {m.shape} does not match {shape}")
    return shape[0]


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return relative_residual(h, dagger(h)) <= tol


def hermitian_eig(h: np.ndarray) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        h: Square matrix, Hermitian to within HERMITIAN_TOL.

    Returns:
        Ascending eigenvalues with their eigenvector columns.

    Raises:
        DimensionMismatch: h is not square.
        NonHermitianInput: h differs from its adjoint.
    """
    check_square(h)
    if not is_hermitian(h):
        raise NonHermitianInput(
            f"matrix is not Hermitian (relative residual {relative_residual(h, dagger(h)):.3e})"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return HermitianEigenSystem(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def unitary_exp(h: np.ndarray, tau: float, *, check: bool = True) -> np.ndarray:
    """Return exp(-i h tau) for Hermitian h.

    ``check=False`` skips the Hermiticity test for callers that build h from
    Hermitian parts (the propagation hot loop).
    """
    if check:
        return hermitian_eig(h).propagator(tau)
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return (eigenvectors * np.exp(-1j * eigenvalues * tau)) @ eigenvectors.conj().T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt product Tr(a^dagger b)."""
    check_square(a, b)
    return complex(np.vdot(a, b))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
