import math
import warnings

import numpy as np
import pytest

from qcorr.errors import (
    BadTransitionError,
    ChannelPositivityWarning,
    DecayHierarchyWarning,
    DomainError,
)
from qcorr.spinsim import (
    DecayConstants,
    PAPER_EPSILON,
    PAPER_HYPERFINE_HZ,
    Rotate,
    SpinSystem,
    TRANSITIONS,
    apply_dephasing,
    apply_rotation,
    build_preparation_sequence,
    initial_thermal_state,
    invert_preparation,
    paper_decay_constants,
    paper_system,
    predicted_cvector,
    prepare_bell_diagonal,
    run_sequence,
    sequence_from_json,
    sequence_to_json,
    transition_frequencies,
)
from qcorr.states import c_vector_of, validate_density_matrix

from conftest import random_density_matrix


@pytest.fixture(scope="module")
def psys():
    return paper_system()


class TestDecayConstants:
    def test_paper_values_warn_not_cp(self):
        with pytest.warns(ChannelPositivityWarning):
            DecayConstants()

    def test_hierarchy_warning(self):
        with pytest.warns(DecayHierarchyWarning):
            DecayConstants(t_c=1.0)

    def test_positive_required(self):
        with pytest.raises(DomainError):
            DecayConstants(t2e=-1.0)

    def test_cp_window_constants_are_silent(self):
        # 1/t_c inside [|n-e|, n+e] and ordered: genuinely CP channel
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            DecayConstants(t2n_star=30e-6, t2e=120e-6, t_c=28e-6)

    def test_cp_window_factor_matrix_psd(self):
        decay = DecayConstants(t2n_star=30e-6, t2e=120e-6, t_c=28e-6)
        for t in np.geomspace(1e-9, 1e-2, 40):
            f = decay.factor_matrix(t)
            assert np.min(np.linalg.eigvalsh(f)) > -1e-12

    def test_paper_factor_matrix_not_psd(self):
        decay = paper_decay_constants()
        worst = min(np.min(np.linalg.eigvalsh(decay.factor_matrix(t)))
                    for t in np.geomspace(1e-8, 1e-3, 30))
        assert worst < -0.1  # demonstrably not completely positive

    def test_gaussian_model(self):
        decay = paper_decay_constants(rho23_model="gaussian")
        assert abs(decay.zq_dq_factor(200e-9) - math.exp(-1.0)) < 1e-15
        assert abs(decay.zq_dq_factor(400e-9) - math.exp(-4.0)) < 1e-15


class TestRotation:
    def test_zero_angle_identity(self, rng):
        rho = random_density_matrix(rng)
        assert np.allclose(apply_rotation(rho, (2, 4), 0.0), rho, atol=0)

    def test_pi_moves_population(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[3, 3] = 1.0  # level 4
        out = apply_rotation(rho, (2, 4), math.pi)
        assert abs(out[1, 1].real - 1.0) < 1e-15
        assert abs(out[3, 3].real) < 1e-30

    def test_two_pi_on_doublet_states(self, psys):
        # exact identity on states with no doublet-to-spectator coherences
        rho = initial_thermal_state(psys)
        assert np.allclose(apply_rotation(rho, (2, 4), 2 * math.pi), rho, atol=1e-15)
        rho2 = rho.copy()
        rho2[1, 3] = rho2[3, 1] = 0.01  # coherence inside the (2,4) doublet
        assert np.allclose(apply_rotation(rho2, (2, 4), 2 * math.pi), rho2, atol=1e-15)

    def test_two_pi_spinor_phase(self, psys):
        # ... but -1 on coherences linking the doublet to a spectator level
        rho = initial_thermal_state(psys)
        rho[0, 1] = rho[1, 0] = 0.01  # (1,2): level 2 in doublet, level 1 not
        out = apply_rotation(rho, (2, 4), 2 * math.pi)
        assert abs(out[0, 1] + 0.01) < 1e-15

    def test_trace_and_positivity_preserved(self, rng):
        for _ in range(50):
            rho = random_density_matrix(rng)
            pair = list(TRANSITIONS.values())[int(rng.integers(4))]
            out = apply_rotation(rho, pair, rng.uniform(0, 2 * math.pi),
                                 rng.uniform(0, 2 * math.pi))
            assert abs(np.trace(out).real - 1.0) < 1e-14
            assert np.min(np.linalg.eigvalsh(out)) > -1e-12

    def test_bad_transition(self):
        with pytest.raises(BadTransitionError):
            apply_rotation(np.eye(4) / 4, (1, 4), math.pi)


class TestDephasing:
    def test_zero_duration(self, rng):
        rho = random_density_matrix(rng)
        out = apply_dephasing(rho, 0.0, paper_decay_constants())
        assert np.allclose(out, rho, atol=0)

    def test_long_duration_diagonal(self, rng):
        rho = random_density_matrix(rng)
        out = apply_dephasing(rho, 10.0, paper_decay_constants())
        assert np.allclose(out, np.diag(np.diag(rho)), atol=1e-15)

    def test_rho23_decay_constant(self):
        # paper anchor: rho_23 -> rho_23 exp(-tau/t_c), t_c = 200 ns
        decay = paper_decay_constants()
        rho = np.eye(4, dtype=complex) / 4.0
        rho[1, 2] = 0.01
        rho[2, 1] = 0.01
        out = apply_dephasing(rho, 300e-9, decay)
        assert abs(out[1, 2] - 0.01 * math.exp(-300.0 / 200.0)) < 1e-18

    def test_channel_masking(self):
        decay = paper_decay_constants()
        rho = np.full((4, 4), 0.25, dtype=complex)
        out = apply_dephasing(rho, 1e-3, decay, channels=("nuclear",))
        assert abs(out[0, 2] - 0.25) < 1e-15       # electron pair untouched
        assert abs(out[0, 1]) < 0.25 * math.exp(-40)  # nuclear pair decayed

    def test_positivity_on_deviation_scale_states(self, rng):
        # protocol-reachable states: 1/4 + O(eps) deviations stay PSD
        decay = paper_decay_constants()
        for _ in range(100):
            dev = random_density_matrix(rng) - np.eye(4) / 4.0
            rho = np.eye(4, dtype=complex) / 4.0 + 0.05 * dev
            out = apply_dephasing(rho, float(rng.uniform(0, 1e-3)), decay)
            assert np.min(np.linalg.eigvalsh(out)) > -1e-12

    def test_negative_duration(self):
        with pytest.raises(DomainError):
            apply_dephasing(np.eye(4) / 4, -1.0, paper_decay_constants())


class TestInitialState:
    def test_small_epsilon_limit(self, psys):
        sys_small = SpinSystem(psys.omega_e, psys.omega_i, psys.a_hz,
                               psys.decay, epsilon=1e-9)
        assert np.allclose(initial_thermal_state(sys_small), np.eye(4) / 4,
                           atol=2e-9)

    def test_paper_epsilon_diagonal(self, psys):
        rho = initial_thermal_state(psys)
        eps = PAPER_EPSILON
        assert np.allclose(np.diag(rho).real,
                           [0.25 + eps, 0.25 + eps, 0.25 - eps, 0.25 - eps],
                           atol=1e-15)

    def test_trace_and_purity(self, psys):
        # direct algebra on the diagonal form: purity = 1/4 + 4 eps^2
        rho = initial_thermal_state(psys)
        assert abs(np.trace(rho).real - 1.0) < 1e-15
        expected_purity = 0.25 + 4.0 * PAPER_EPSILON ** 2
        assert abs(np.trace(rho @ rho).real - expected_purity) < 1e-15


class TestTransitionFrequencies:
    def test_decoupled_limit(self):
        sys_ = SpinSystem(omega_e=2 * math.pi * 9.7e9,
                          omega_i=2 * math.pi * 6.0e6,
                          a_hz=1e-3, decay=paper_decay_constants())
        freqs = transition_frequencies(sys_)
        assert abs(freqs["MW1"] - 9.7e9) < 1.0
        assert abs(freqs["MW2"] - 9.7e9) < 1.0
        assert abs(freqs["RF1"] - 6.0e6) < 1.0
        assert abs(freqs["RF2"] - 6.0e6) < 1.0

    def test_hyperfine_splitting_exact(self, psys):
        freqs = transition_frequencies(psys)
        split = freqs["MW2"] - freqs["MW1"]
        assert abs(split - PAPER_HYPERFINE_HZ) < 1e-3 * PAPER_HYPERFINE_HZ * 1e-3

    def test_paper_fit(self, psys):
        freqs = transition_frequencies(psys)
        assert abs(freqs["MW1"] - 9.701e9) < 1.0
        assert abs(freqs["MW2"] - 9.818e9) / 9.818e9 < 0.01
        assert abs(freqs["RF1"] - 52.383e6) / 52.383e6 < 0.01
        assert abs(freqs["RF2"] - 65.181e6) / 65.181e6 < 0.01


class TestPreparation:
    def test_theta_zero(self, psys):
        rho, predicted, _ = prepare_bell_diagonal(psys, 0.0, 0.0, sign=1)
        c, _ = c_vector_of(rho)
        assert np.allclose(predicted, (0.0, 0.0, 4 * PAPER_EPSILON), atol=1e-15)
        assert np.allclose(c, predicted, atol=1e-10)

    def test_theta_pi(self, psys):
        tau3 = 150e-9
        lam = math.exp(-150.0 / 200.0)
        rho, predicted, _ = prepare_bell_diagonal(psys, math.pi, tau3, sign=1)
        c, _ = c_vector_of(rho)
        assert np.allclose(predicted,
                           (-2 * PAPER_EPSILON * lam, -2 * PAPER_EPSILON * lam, 0.0),
                           atol=1e-15)
        assert np.allclose(c, predicted, atol=1e-10)

    def test_closed_form_random(self, psys, rng):
        for _ in range(10):
            theta = rng.uniform(0, math.pi)
            tau3 = rng.uniform(0, 1e-6)
            sign = 1 if rng.random() < 0.5 else -1
            rho, predicted, _ = prepare_bell_diagonal(psys, theta, tau3, sign)
            c, residual = c_vector_of(rho)
            assert residual < 1e-10
            assert max(abs(a - b) for a, b in zip(c, predicted)) < 1e-10

    def test_prepared_state_physical(self, psys, rng):
        for _ in range(10):
            rho, _, _ = prepare_bell_diagonal(
                psys, rng.uniform(0, math.pi), rng.uniform(0, 5e-7),
                1 if rng.random() < 0.5 else -1)
            validate_density_matrix(rho)

    def test_short_waits_break_idealization(self, psys):
        # the paper's literal tau_1 = 1 us << T2e leaves live electron
        # coherence and the closed form no longer holds
        theta = 2.0
        rho, predicted, _ = prepare_bell_diagonal(psys, theta, 100e-9, 1,
                                                  tau1=1e-6, tau2=200e-6)
        c, _ = c_vector_of(rho)
        assert max(abs(a - b) for a, b in zip(c, predicted)) > 1e-6

    def test_gaussian_lambda_consistency(self):
        sys_ = paper_system(decay=paper_decay_constants(rho23_model="gaussian"))
        rho, predicted, _ = prepare_bell_diagonal(sys_, 2.0, 300e-9, 1)
        c, _ = c_vector_of(rho)
        assert max(abs(a - b) for a, b in zip(c, predicted)) < 1e-10

    def test_invert_roundtrip(self, psys, rng):
        for _ in range(20):
            theta = rng.uniform(0.1, math.pi - 0.1)
            tau3 = rng.uniform(0, 5e-7)
            sign = 1 if rng.random() < 0.5 else -1
            c = predicted_cvector(psys, theta, tau3, sign)
            theta2, tau32, sign2 = invert_preparation(c, psys)
            assert abs(theta2 - theta) < 1e-12
            assert abs(tau32 - tau3) < 1e-12
            assert sign2 == sign

    def test_invert_rejects_unreachable(self, psys):
        with pytest.raises(DomainError):
            invert_preparation((0.5, 0.5, 0.0), psys)  # cx > 0
        with pytest.raises(DomainError):
            invert_preparation((-0.001, -0.001, 0.9), psys)  # |cz| > 4 eps

    def test_validation(self, psys):
        with pytest.raises(DomainError):
            prepare_bell_diagonal(psys, -0.1, 0.0)
        with pytest.raises(DomainError):
            prepare_bell_diagonal(psys, 1.0, -1e-9)
        with pytest.raises(DomainError):
            prepare_bell_diagonal(psys, 1.0, 0.0, sign=2)


class TestSequences:
    def test_waits_commute(self, psys, rng):
        rho = random_density_matrix(rng)
        d = psys.decay
        ab = apply_dephasing(apply_dephasing(rho, 1e-6, d), 5e-6, d)
        ba = apply_dephasing(apply_dephasing(rho, 5e-6, d), 1e-6, d)
        assert np.allclose(ab, ba, atol=1e-16)

    def test_rotations_do_not_commute(self, psys):
        rho = initial_thermal_state(psys)
        ab = apply_rotation(apply_rotation(rho, (2, 4), 1.0), (1, 2), 1.0)
        ba = apply_rotation(apply_rotation(rho, (1, 2), 1.0), (2, 4), 1.0)
        assert np.max(np.abs(ab - ba)) > 1e-4

    def test_upper_branch_step_order(self, psys):
        # golden pin of the published sequence diagram (upper branch)
        seq = build_preparation_sequence(psys, 1.0, 2e-7, sign=1)
        kinds = [(type(s).__name__,
                  s.transition if isinstance(s, Rotate) else None)
                 for s in seq.steps]
        assert kinds == [("Rotate", (2, 4)), ("Wait", None),
                         ("Rotate", (1, 2)), ("Wait", None),
                         ("Rotate", (3, 4)), ("Rotate", (2, 4)),
                         ("Wait", None)]
        assert seq.steps[4].phase == math.pi  # rho23-generating pulse on -x

    def test_lower_branch_transitions(self, psys):
        seq = build_preparation_sequence(psys, 1.0, 2e-7, sign=-1)
        rotations = [s.transition for s in seq.steps if isinstance(s, Rotate)]
        assert rotations == [(2, 4), (3, 4), (1, 2), (1, 3)]

    def test_json_roundtrip(self, psys):
        seq = build_preparation_sequence(psys, 1.234, 2.5e-7, sign=-1)
        text = sequence_to_json(seq)
        back = sequence_from_json(text)
        assert back == seq

    def test_json_degrees(self):
        text = '[{"op": "rotate", "transition": [2, 4], "angle_deg": 90.0}]'
        seq = sequence_from_json(text)
        assert abs(seq.steps[0].angle - math.pi / 2) < 1e-15

    def test_json_validation(self):
        with pytest.raises(DomainError):
            sequence_from_json('{"op": "rotate"}')
        with pytest.raises(DomainError):
            sequence_from_json('[{"op": "slide"}]')
        with pytest.raises(BadTransitionError):
            sequence_from_json(
                '[{"op": "rotate", "transition": [1, 4], "angle_deg": 90}]')
        with pytest.raises(DomainError):
            sequence_from_json('[{"op": "wait", "duration_s": 1e-6, '
                               '"channel": "sideways"}]')

    def test_run_sequence_matches_manual(self, psys, rng):
        rho = random_density_matrix(rng)
        seq = sequence_from_json(
            '[{"op": "rotate", "transition": [1, 2], "angle_deg": 45},'
            ' {"op": "wait", "duration_s": 1e-6},'
            ' {"op": "rotate", "transition": [2, 4], "angle_deg": 180}]')
        manual = apply_rotation(rho, (1, 2), math.pi / 4)
        manual = apply_dephasing(manual, 1e-6, psys.decay)
        manual = apply_rotation(manual, (2, 4), math.pi)
        assert np.allclose(run_sequence(rho, seq, psys.decay), manual, atol=1e-15)


class TestSpinSystemValidation:
    def test_epsilon_range(self, psys):
        with pytest.raises(DomainError):
            SpinSystem(psys.omega_e, psys.omega_i, psys.a_hz, psys.decay,
                       epsilon=0.3)

    def test_positive_fields(self, psys):
        with pytest.raises(DomainError):
            SpinSystem(-1.0, psys.omega_i, psys.a_hz, psys.decay)
