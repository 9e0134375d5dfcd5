"""Quantum-correlation measures for two-qubit states.

All entropies and the discord are in bits (base-2 logs). Discord of a
Bell-diagonal state has the closed form

    D = 1 + h(c) - S(rho),   c = max(|cx|, |cy|, |cz|),

with h the binary-entropy-like function h(x) = H2((1+x)/2). The
definition-level value (mutual information minus the best classical
correlation over local projective measurements) is available as
``discord_oracle`` and is used to validate the closed form.
"""

import math
from dataclasses import dataclass

import numpy as np

from qcorr import backend, numerics
from qcorr.errors import DomainError, UnphysicalError
from qcorr.numerics import IDENTITY_2, PAULIS, eig_hermitian, kron, partial_trace
from qcorr.states import bell_weights, validate_cvector, validate_density_matrix

ENTROPY_EIGENVALUE_FLOOR = -1e-8   # below this: Unphysical; in (floor, 0): clamp
DISCORD_CLAMP = -1e-12

_BRANCHES = ("x", "y", "z")


@dataclass(frozen=True)
class DiscordResult:
    """Closed-form discord of a Bell-diagonal state."""

    discord: float
    c_max: float
    entropy: float
    branch: str  # which of |cx|, |cy|, |cz| attained the max (ties: x, y, z)


def _entropy_of_eigenvalues(w) -> float:
    total = 0.0
    for lam in w:
        lam = float(lam)
        if lam < ENTROPY_EIGENVALUE_FLOOR:
            raise UnphysicalError(f"eigenvalue {lam:.3e} below "
                                  f"{ENTROPY_EIGENVALUE_FLOOR:g}")
        if lam > 0.0:
            total -= lam * math.log2(lam)
    return total


def von_neumann_entropy(rho) -> float:
    """-Tr(rho log2 rho) for a unit-trace Hermitian 2x2 or 4x4 matrix."""
    rho = numerics.as_complex_matrix(rho)
    w, _ = eig_hermitian(rho)
    return _entropy_of_eigenvalues(w)


def binary_h(x: float) -> float:
    """h(x) = -((1+x)/2) log2((1+x)/2) - ((1-x)/2) log2((1-x)/2)."""
    x = float(x)
    if abs(x) > 1.0 + 1e-12:
        raise DomainError(f"binary_h argument {x!r} outside [-1, 1]")
    x = min(max(x, -1.0), 1.0)
    p = 0.5 * (1.0 + x)
    q = 1.0 - p
    total = 0.0
    if p > 0.0:
        total -= p * math.log2(p)
    if q > 0.0:
        total -= q * math.log2(q)
    return total


def discord_bell_diagonal(c) -> DiscordResult:
    """Closed-form discord D = 1 + h(c_max) - S for a physical c-vector.

    The entropy comes from the four Bell weights directly, so this never
    diagonalizes anything and runs in microseconds.
    """
    c = validate_cvector(c)
    mags = [abs(c.cx), abs(c.cy), abs(c.cz)]
    k = int(np.argmax(mags))  # first max wins: tie order x, y, z
    c_max = mags[k]
    entropy = _entropy_of_eigenvalues(np.clip(bell_weights(c), 0.0, None))
    d = 1.0 + binary_h(c_max) - entropy
    if d < 0.0:
        if d < DISCORD_CLAMP:
            raise UnphysicalError(f"discord {d:.3e} below the clamp window")
        d = 0.0
    return DiscordResult(d, c_max, entropy, _BRANCHES[k])


def mutual_information(rho) -> float:
    """I = S(rho_A) + S(rho_B) - S(rho), clamped at 0 for tiny negatives."""
    rho = validate_density_matrix(rho)
    val = (von_neumann_entropy(partial_trace(rho, 1))
           + von_neumann_entropy(partial_trace(rho, 2))
           - von_neumann_entropy(rho))
    return 0.0 if -1e-12 <= val < 0.0 else val


def _bloch_vector(rho2) -> np.ndarray:
    return np.array([float(np.trace(rho2 @ s).real) for s in PAULIS])


def _correlation_matrix(rho) -> np.ndarray:
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = float(np.trace(rho @ kron(si, sj)).real)
    return t


def measurement_projectors(theta: float, phi: float):
    """Rank-1 projectors (1 +/- n.sigma)/2 along the Bloch direction."""
    n = np.array([math.sin(theta) * math.cos(phi),
                  math.sin(theta) * math.sin(phi),
                  math.cos(theta)])
    n_sigma = sum(ni * si for ni, si in zip(n, PAULIS))
    return (IDENTITY_2 + n_sigma) / 2.0, (IDENTITY_2 - n_sigma) / 2.0


def classical_correlation(rho, theta: float, phi: float,
                          measured_qubit: int = 2) -> float:
    """J for one fixed projective measurement, by explicit matrix algebra.

    Reference route (projectors, conditional states, eigen-entropies); the
    optimized scan in ``discord_oracle`` must agree with it.
    """
    rho = validate_density_matrix(rho)
    p_plus, p_minus = measurement_projectors(theta, phi)
    unmeasured = 1 if measured_qubit == 2 else 2
    s_unmeasured = von_neumann_entropy(partial_trace(rho, unmeasured))
    total = s_unmeasured
    for proj in (p_plus, p_minus):
        big = kron(IDENTITY_2, proj) if measured_qubit == 2 else kron(proj, IDENTITY_2)
        sub = big @ rho @ big
        prob = float(np.trace(sub).real)
        if prob > 1e-15:
            cond = partial_trace(sub, unmeasured) / prob
            total -= prob * von_neumann_entropy(cond)
    return total


def discord_oracle(rho, measured_qubit: int = 2, grid=(64, 128),
                   refine_iters: int = 50) -> float:
    """Definition-level discord: I minus the best classical correlation.

    Maximization over projective measurements on ``measured_qubit`` by an
    exhaustive (n_theta, n_phi) grid followed by coordinate descent with
    step halving. Valid for any two-qubit state.
    """
    rho = validate_density_matrix(rho)
    if measured_qubit not in (1, 2):
        raise DomainError(f"measured_qubit must be 1 or 2, got {measured_qubit}")
    rho_a = partial_trace(rho, 1)
    rho_b = partial_trace(rho, 2)
    s_a = von_neumann_entropy(rho_a)
    s_b = von_neumann_entropy(rho_b)
    s_ab = von_neumann_entropy(rho)

    a = _bloch_vector(rho_a)
    b = _bloch_vector(rho_b)
    t = _correlation_matrix(rho)
    if measured_qubit == 2:
        s_unmeasured = s_a
    else:
        a, b, t = b, a, t.T
        s_unmeasured = s_b

    min_g, _, _ = backend.measurement_entropy_scan(
        a, b, t, int(grid[0]), int(grid[1]), int(refine_iters))
    j_max = s_unmeasured - min_g
    d = (s_a + s_b - s_ab) - j_max
    return max(d, 0.0)


def concurrence(rho) -> float:
    """Wootters concurrence from the spin-flipped spectrum.

    mu_i are the square roots of the eigenvalues of rho (YY) rho* (YY),
    computed Hermitianly as the spectrum of sqrt(rho) rho~ sqrt(rho).
    """
    rho = validate_density_matrix(rho)
    yy = kron(PAULIS[1], PAULIS[1])
    rho_tilde = yy @ rho.conj() @ yy
    w, v = eig_hermitian(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    r = sqrt_rho @ rho_tilde @ sqrt_rho
    r = 0.5 * (r + r.conj().T)
    mu = np.sqrt(np.clip(eig_hermitian(r).eigenvalues, 0.0, None))[::-1]
    return max(0.0, float(mu[0] - mu[1] - mu[2] - mu[3]))


def concurrence_bell_diagonal(c) -> float:
    """Closed form for Bell-diagonal states: max(0, 2 max_b lambda_b - 1)."""
    weights = bell_weights(validate_cvector(c))
    return max(0.0, 2.0 * float(np.max(weights)) - 1.0)


def eof(rho) -> float:
    """Entanglement of formation h(sqrt(1 - C^2)); zero iff C = 0."""
    return eof_from_concurrence(concurrence(rho))


def eof_from_concurrence(c: float) -> float:
    c = float(c)
    return binary_h(math.sqrt(max(0.0, 1.0 - c * c)))
