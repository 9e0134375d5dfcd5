import math

import numpy as np
import pytest

from qcorr.errors import (
    DomainError,
    HighTemperatureApproximationWarning,
    UnphysicalError,
)
from qcorr.numerics import kron, partial_trace
from qcorr.states import (
    BELL_LABELS,
    BELL_SIGNATURES,
    BELL_VECTORS,
    CVector,
    bell_diagonal,
    bell_weights,
    c_vector_of,
    high_t_cvector,
    sample_physical_cvector,
    thermal_state,
    validate_density_matrix,
    weights_to_cvector,
)
from qcorr.numerics import PAULIS


def exact_thermal_cvector(j, delta, t):
    """Independent Boltzmann oracle over the four analytic levels."""
    beta = 1.0 / t
    e_zeeman = j * delta / 4.0
    e_t0 = -e_zeeman + j / 2.0
    e_s = -e_zeeman - j / 2.0
    w_zeeman = math.exp(-beta * e_zeeman)
    w_t0 = math.exp(-beta * e_t0)
    w_s = math.exp(-beta * e_s)
    z = 2.0 * w_zeeman + w_t0 + w_s
    # phi+/phi- weights both w_zeeman/Z; psi+ = triplet0, psi- = singlet
    return weights_to_cvector(np.array([w_zeeman, w_zeeman, w_t0, w_s]) / z)


class TestBellConvention:
    def test_signatures_match_bell_states(self):
        # oracle: <b| sigma_i sigma_i |b> computed from the Bell vectors
        for label, sig in zip(BELL_LABELS, BELL_SIGNATURES):
            vec = BELL_VECTORS[label]
            for i, s in enumerate(PAULIS):
                expect = vec.conj() @ kron(s, s) @ vec
                assert abs(expect.real - sig[i]) < 1e-14

    def test_weights_sum_to_one(self, rng):
        for _ in range(200):
            c = sample_physical_cvector(rng)
            assert abs(float(np.sum(bell_weights(c))) - 1.0) <= 1e-14

    def test_weights_roundtrip(self, rng):
        for _ in range(50):
            c = sample_physical_cvector(rng)
            assert np.allclose(weights_to_cvector(bell_weights(c)), c, atol=1e-14)


class TestBellDiagonal:
    def test_maximally_mixed(self):
        assert np.allclose(bell_diagonal((0, 0, 0)), np.eye(4) / 4.0)

    def test_phi_plus_vertex(self):
        vec = BELL_VECTORS["phi_plus"]
        assert np.allclose(bell_diagonal((1, -1, 1)), np.outer(vec, vec.conj()),
                           atol=1e-15)

    def test_fig3_state_valid(self):
        rho = bell_diagonal((-0.0044, -0.0044, 0.0008))
        validate_density_matrix(rho)

    def test_unphysical_reports_signature(self):
        with pytest.raises(UnphysicalError, match="psi_minus"):
            bell_diagonal((1.0, 1.0, 1.0))

    def test_random_states_physical(self, rng):
        for _ in range(200):
            c = sample_physical_cvector(rng)
            validate_density_matrix(bell_diagonal(c))

    def test_marginals_maximally_mixed(self, rng):
        for _ in range(50):
            rho = bell_diagonal(sample_physical_cvector(rng))
            for keep in (1, 2):
                assert np.max(np.abs(partial_trace(rho, keep) - np.eye(2) / 2)) < 1e-12


class TestCVectorOf:
    def test_roundtrip(self, rng):
        for _ in range(100):
            c = sample_physical_cvector(rng)
            got, residual = c_vector_of(bell_diagonal(c))
            assert np.allclose(got, c, atol=1e-13)
            assert residual < 1e-12

    def test_maximally_mixed(self):
        c, residual = c_vector_of(np.eye(4, dtype=complex) / 4.0)
        assert np.allclose(c, (0, 0, 0), atol=1e-15)
        assert residual < 1e-15

    def test_exact_thermal_is_bell_diagonal(self):
        rho = thermal_state(1.0, 0.5, 1.0, mode="exact")
        c, residual = c_vector_of(rho)
        assert residual < 1e-12
        assert abs(c.cx - c.cy) < 1e-12


class TestThermalState:
    def test_infinite_temperature(self):
        for mode in ("exact", "high_T"):
            rho = thermal_state(1.0, 1.3, 1e9, mode=mode)
            assert np.max(np.abs(rho - np.eye(4) / 4.0)) < 1e-8

    def test_exact_frozen_closed_form(self):
        # spec-quoted form: cx = cy = -2 sinh(1/2) e^{1/4} / Z,
        # Z = 2 e^{-1/4} + 2 e^{1/4} cosh(1/2)
        z = 2 * math.exp(-0.25) + 2 * math.exp(0.25) * math.cosh(0.5)
        expected_cx = -2.0 * math.sinh(0.5) * math.exp(0.25) / z
        c, _ = c_vector_of(thermal_state(1.0, 1.0, 1.0))
        assert abs(c.cx - expected_cx) < 1e-14
        assert abs(c.cy - expected_cx) < 1e-14

    def test_exact_matches_boltzmann_oracle(self, rng):
        for _ in range(25):
            j = rng.uniform(0.2, 2.0)
            delta = rng.uniform(-2.0, 2.0)
            t = rng.uniform(0.2, 3.0)
            c, residual = c_vector_of(thermal_state(j, delta, t))
            assert residual < 1e-10
            assert np.allclose(c, exact_thermal_cvector(j, delta, t), atol=1e-12)

    def test_high_t_frozen(self):
        c, _ = c_vector_of(thermal_state(1.0, 2.0, 10.0, mode="high_T"))
        assert np.allclose(c, (-0.025, -0.025, -0.05), atol=1e-15)

    def test_high_t_matches_exact_to_second_order(self, rng):
        for _ in range(25):
            j = 1.0
            delta = rng.uniform(-2.0, 2.0)
            t = rng.uniform(10.0, 100.0)  # J/T <= 0.1
            approx = high_t_cvector(j, delta, t)
            exact = exact_thermal_cvector(j, delta, t)
            bound = 2.0 * (j / t) ** 2
            assert max(abs(a - e) for a, e in zip(approx, exact)) < bound

    def test_high_t_warning(self):
        with pytest.warns(HighTemperatureApproximationWarning):
            thermal_state(1.0, 1.0, 2.0, mode="high_T")

    @pytest.mark.filterwarnings("ignore::qcorr.errors.HighTemperatureApproximationWarning")
    def test_high_t_unphysical(self):
        with pytest.raises(UnphysicalError):
            thermal_state(1.0, 1.0, 0.2, mode="high_T")

    def test_high_t_needs_positive_t(self):
        with pytest.raises(DomainError):
            thermal_state(1.0, 1.0, 0.0, mode="high_T")

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            thermal_state(1.0, 1.0, 1.0, mode="medium")

    def test_zero_temperature_unique_ground(self):
        # delta > -1: singlet ground state
        rho = thermal_state(1.0, 0.5, 0.0)
        singlet = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
        assert np.allclose(rho, np.outer(singlet, singlet.conj()), atol=1e-12)

    def test_zero_temperature_degenerate_ground(self):
        # delta < -1: uu and dd degenerate -> equal mixture
        rho = thermal_state(1.0, -2.0, 0.0)
        expected = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
        assert np.allclose(rho, expected, atol=1e-12)


class TestSampler:
    def test_deterministic(self):
        a = sample_physical_cvector(np.random.Generator(np.random.PCG64(7)))
        b = sample_physical_cvector(np.random.Generator(np.random.PCG64(7)))
        assert a == b

    def test_physical(self, rng):
        for _ in range(500):
            c = sample_physical_cvector(rng)
            assert np.min(bell_weights(c)) >= -1e-12
            assert isinstance(c, CVector)
