"""Two-qubit density matrices: Bell-diagonal states and XXZ thermal states.

Density matrices are plain 4x4 complex128 arrays in the product basis
|uu>, |ud>, |du>, |dd> (first factor = qubit 1). A Bell-diagonal state is
parametrized by the correlation triple c = (cx, cy, cz):

    rho = (1 + cx XX + cy YY + cz ZZ) / 4

Bell-weight sign convention (fixed here, used everywhere):

    phi_plus  -> (+1, -1, +1)      phi_minus -> (-1, +1, +1)
    psi_plus  -> (+1, +1, -1)      psi_minus -> (-1, -1, -1)

with weight lambda_b = (1 + s . c) / 4 for signature s.
"""

import math
import warnings
from typing import NamedTuple

import numpy as np

from qcorr import numerics
from qcorr.errors import (
    DomainError,
    HighTemperatureApproximationWarning,
    UnphysicalError,
)
from qcorr.numerics import IDENTITY_2, PAULIS, kron

BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")
BELL_SIGNATURES = np.array(
    [[1, -1, 1], [-1, 1, 1], [1, 1, -1], [-1, -1, -1]], dtype=float)

WEIGHT_FLOOR = -1e-12  # physicality tolerance on Bell weights

_SQ2 = 1.0 / math.sqrt(2.0)
BELL_VECTORS = {
    "phi_plus": np.array([_SQ2, 0, 0, _SQ2], dtype=np.complex128),
    "phi_minus": np.array([_SQ2, 0, 0, -_SQ2], dtype=np.complex128),
    "psi_plus": np.array([0, _SQ2, _SQ2, 0], dtype=np.complex128),
    "psi_minus": np.array([0, _SQ2, -_SQ2, 0], dtype=np.complex128),
}

_PAULI_PAIRS = tuple(kron(s, s) for s in PAULIS)
IDENTITY_4 = kron(IDENTITY_2, IDENTITY_2)
IDENTITY_4.setflags(write=False)


class CVector(NamedTuple):
    """Correlation triple of a Bell-diagonal state, each component in [-1, 1]."""

    cx: float
    cy: float
    cz: float


def bell_weights(c) -> np.ndarray:
    """The four Bell weights (1 + s.c)/4 in BELL_LABELS order."""
    c = np.asarray(c, dtype=float)
    return (1.0 + BELL_SIGNATURES @ c) / 4.0


def weights_to_cvector(weights) -> CVector:
    """Inverse of bell_weights: c_i = sum_b s_i(b) lambda_b."""
    weights = np.asarray(weights, dtype=float)
    c = BELL_SIGNATURES.T @ weights
    return CVector(*c)


def validate_cvector(c) -> CVector:
    """Check physicality: every Bell weight >= -1e-12; weights sum to 1."""
    c = CVector(*(float(x) for x in c))
    weights = bell_weights(c)
    bad = np.nonzero(weights < WEIGHT_FLOOR)[0]
    if bad.size:
        b = int(bad[0])
        sig = tuple(int(s) for s in BELL_SIGNATURES[b])
        raise UnphysicalError(
            f"Bell weight for {BELL_LABELS[b]} (signature {sig}) is "
            f"{weights[b]:.3e} < {WEIGHT_FLOOR:g}")
    if abs(float(np.sum(weights)) - 1.0) > 1e-14:
        raise UnphysicalError("Bell weights do not sum to 1")
    return c


def _bell_diagonal_matrix(c) -> np.ndarray:
    rho = np.array(IDENTITY_4)
    for ci, pair in zip(c, _PAULI_PAIRS):
        rho += float(ci) * pair
    return rho / 4.0


def bell_diagonal(c) -> np.ndarray:
    """Density matrix (1 + cx XX + cy YY + cz ZZ)/4 for a physical c."""
    c = validate_cvector(c)
    return _bell_diagonal_matrix(c)


def c_vector_of(rho):
    """Extract c_i = Tr(rho sigma_i sigma_i) and the Bell-diagonal residual.

    The residual is the Frobenius distance between rho and the Bell-diagonal
    state rebuilt from the extracted c; it vanishes iff rho is Bell-diagonal.
    """
    rho = validate_density_matrix(rho)
    c = CVector(*(float(np.trace(rho @ pair).real) for pair in _PAULI_PAIRS))
    residual = numerics.frobenius_norm(rho - _bell_diagonal_matrix(c))
    return c, residual


def validate_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    """Hermitian within tol, unit trace within tol, eigenvalues >= -tol."""
    rho = numerics.as_complex_matrix(rho)
    if not numerics.is_hermitian(rho, tol):
        raise UnphysicalError("density matrix is not Hermitian within "
                              f"{tol:g}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise UnphysicalError(f"trace is {tr!r}, not 1 within {tol:g}")
    w, _ = numerics.eig_hermitian(rho)
    if float(w[0]) < -tol:
        raise UnphysicalError(f"negative eigenvalue {w[0]:.3e} below -{tol:g}")
    return rho


def thermal_state(j: float, delta: float, temperature: float,
                  mode: str = "exact") -> np.ndarray:
    """Thermal state of the two-qubit XXZ model (units J = k_B = 1).

    mode "exact": e^{-H/T}/Z; at T = 0 the maximally mixed state over the
    ground eigenspace (membership threshold 1e-12 relative to |E_min|).
    mode "high_T": the first-order expansion 1/4 - (J/16T)(XX + YY + d ZZ),
    i.e. c = (-J/4T, -J/4T, -d J/4T); warns when J/T > 0.1.
    """
    from qcorr.xxzmodel import hamiltonian  # local import: cycle with sweep

    if mode == "exact":
        if temperature < 0:
            raise DomainError("exact mode needs T >= 0")
        h = hamiltonian(j, delta)
        if temperature == 0:
            w, v = numerics.eig_hermitian(h)
            e_min = float(w[0])
            thresh = 1e-12 * max(1.0, abs(e_min))
            members = np.nonzero(w - e_min < thresh)[0]
            rho = np.zeros((4, 4), dtype=np.complex128)
            for k in members:
                vec = v[:, k]
                rho += np.outer(vec, vec.conj())
            return rho / len(members)
        boltz = numerics.matrix_exp_hermitian(h, -1.0 / temperature)
        return boltz / float(np.trace(boltz).real)

    if mode == "high_T":
        if temperature <= 0:
            raise DomainError("high_T mode needs T > 0")
        if j / temperature > 0.1:
            warnings.warn(
                f"high-T expansion with J/T = {j / temperature:.3g} > 0.1",
                HighTemperatureApproximationWarning, stacklevel=2)
        x = j / (4.0 * temperature)
        return bell_diagonal(CVector(-x, -x, -delta * x))

    raise DomainError(f"unknown thermal mode {mode!r}")


def high_t_cvector(j: float, delta: float, temperature: float) -> CVector:
    """The c-vector of the high-temperature thermal expansion."""
    x = j / (4.0 * temperature)
    return CVector(-x, -x, -delta * x)


def sample_physical_cvector(rng: np.random.Generator) -> CVector:
    """Uniform sample from the Bell tetrahedron.

    Four unit exponentials (from uniforms, 4 draws) normalized to the weight
    simplex, mapped linearly to c-space. Stream discipline: exactly four
    rng.random() calls per sample.
    """
    u = rng.random(4)
    e = -np.log1p(-u)
    return weights_to_cvector(e / np.sum(e))
