"""Dense complex linear algebra for small (dim <= 8) Hermitian problems.

Matrices are plain ``numpy.ndarray`` of complex128. The eigensolver is a
cyclic Jacobi iteration (compiled or pure backend, see ``qcorr.backend``):
robust, dependency-free and deterministic at these sizes.
"""

from typing import NamedTuple

import numpy as np

from qcorr import backend
from qcorr.errors import (
    BadDimensionError,
    DimensionOverflowError,
    NoConvergenceError,
    NotHermitianError,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY_2):
    _m.setflags(write=False)

KRON_DIM_CAP = 16
MAX_EIG_DIM = 8
HERMITIAN_TOL = 1e-10

# Jacobi parameters: sweep cap and off-diagonal threshold relative to ||A||_F.
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-14


class EigenDecomposition(NamedTuple):
    """Eigenvalues ascending, orthonormal eigenvectors in columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_complex_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadDimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_complex_matrix(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned ascending with eigenvector columns permuted
    accordingly; each eigenvector's largest-magnitude entry is made real
    positive so repeated runs (and both backends) give identical output.

    Raises NotHermitianError / BadDimensionError / NoConvergenceError.
    """
    m = as_complex_matrix(m)
    n = m.shape[0]
    if n > MAX_EIG_DIM:
        raise BadDimensionError(f"dim {n} exceeds the eigensolver cap {MAX_EIG_DIM}")
    if not is_hermitian(m, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance "
                                f"{tol:g}")

    w, v, converged = backend.jacobi_eigh(m, JACOBI_MAX_SWEEPS, JACOBI_TOL)
    if not converged:
        raise NoConvergenceError(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]

    # canonical per-column phase: largest-|entry| component real positive
    for k in range(n):
        col = v[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0.0:
            col *= pivot.conjugate() / abs(pivot)

    # re-orthonormalize degenerate clusters (Gram-Schmidt); a no-op up to
    # rounding for the already-unitary Jacobi output
    scale = max(1.0, float(np.max(np.abs(w))))
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(w[stop] - w[start]) < 1e-12 * scale:
            stop += 1
        if stop - start > 1:
            for k in range(start, stop):
                col = v[:, k]
                for j in range(start, k):
                    col -= np.vdot(v[:, j], col) * v[:, j]
                col /= np.linalg.norm(col)
        start = stop

    return EigenDecomposition(w, v)


def matrix_exp_hermitian(m, scale: float = 1.0) -> np.ndarray:
    """e^{scale*m} for Hermitian m, via the Jacobi eigendecomposition."""
    w, v = eig_hermitian(m)
    return (v * np.exp(scale * w)) @ v.conj().T


def kron(a, b) -> np.ndarray:
    """Tensor product with a dimension cap of 16."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    dim = a.shape[0] * b.shape[0]
    if dim > KRON_DIM_CAP:
        raise DimensionOverflowError(
            f"tensor product dim {dim} exceeds cap {KRON_DIM_CAP}")
    return np.kron(a, b)


def partial_trace(rho, keep: int) -> np.ndarray:
    """Trace out one qubit of a 4x4 matrix; ``keep`` is 1 or 2 (1-based)."""
    rho = as_complex_matrix(rho)
    if rho.shape != (4, 4):
        raise BadDimensionError(f"partial_trace needs 4x4, got {rho.shape}")
    if keep not in (1, 2):
        raise BadDimensionError(f"keep must be 1 or 2, got {keep}")
    r = rho.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    return np.einsum("jijk->ik", r)


def trace_distance(a, b) -> float:
    """(1/2)||a - b||_1 via the Hermitian eigenvalues of the difference."""
    d = as_complex_matrix(a) - as_complex_matrix(b)
    d = 0.5 * (d + d.conj().T)
    w, _ = eig_hermitian(d)
    return 0.5 * float(np.sum(np.abs(w)))
