"""Electron-nuclear spin-1/2 pair: transitions, selective pulses, dephasing.

Level labels follow the energy diagram of the donor system: 1 = |uu>,
2 = |ud>, 3 = |du>, 4 = |dd>, left arrow = electron, in the tensor basis
electron (x) nucleus. The four addressable transitions are

    MW1 = (2,4)   MW2 = (1,3)   RF1 = (1,2)   RF2 = (3,4)

Pulses are instantaneous selective rotations
exp(-i(angle/2)(cos(phase) sx + sin(phase) sy)) embedded in the driven
doublet. Note the spinor phase: a 2pi rotation is -1 on the doublet, so it
flips coherences linking the doublet to spectator levels (it is the exact
identity on states without such coherences).

Waits apply phenomenological multiplicative decay per coherence:
(1,2),(3,4) with T2n*, (1,3),(2,4) with T2e, and the zero/double-quantum
pair (2,3),(1,4) with t_c. Populations are untouched (T1 >> all sequence
durations; see apply_population_relaxation).

Sign conventions, fixed so the preparation sequences reproduce

    cx = cy = -eps (1 - cos theta) lambda(tau3),  cz = +/- 2 eps (1 + cos theta):

the initial deviation is +2 eps Sz (x) 1 (excess population on the
electron-up levels 1, 2) and the rho_23-generating 90-degree RF pulse is
applied along -x (phase pi).
"""

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from qcorr.errors import (
    BadTransitionError,
    ChannelPositivityWarning,
    DecayHierarchyWarning,
    DomainError,
)
from qcorr.numerics import IDENTITY_2, PAULIS, eig_hermitian, kron
from qcorr.states import CVector

# paper-calibrated constants for the P:Si benchmark system
PAPER_EPSILON = 7.35e-3            # g beta_e B0 / 8 k_B T_exp at 8 K
PAPER_HYPERFINE_HZ = 117e6
PAPER_MW1_HZ = 9.701e9
PAPER_MW2_HZ = 9.818e9
PAPER_RF1_HZ = 52.383e6
PAPER_RF2_HZ = 65.181e6

ELECTRON_GYROMAGNETIC_HZ_PER_T = 27.9715e9   # g = 1.9985 donor electron
P31_GYROMAGNETIC_HZ_PER_T = 17.235e6         # 31P nucleus
NUCLEAR_TO_ELECTRON_RATIO = P31_GYROMAGNETIC_HZ_PER_T / ELECTRON_GYROMAGNETIC_HZ_PER_T

TRANSITIONS = {"MW1": (2, 4), "MW2": (1, 3), "RF1": (1, 2), "RF2": (3, 4)}
_ALLOWED_PAIRS = frozenset(TRANSITIONS.values())

# coherence groups by level pair (1-based)
CHANNEL_PAIRS = {
    "electron": ((1, 3), (2, 4)),
    "nuclear": ((1, 2), (3, 4)),
    "zq_dq": ((2, 3), (1, 4)),
}
ALL_CHANNELS = ("electron", "nuclear", "zq_dq")
WAIT_CHANNELS = ("all",) + ALL_CHANNELS


@dataclass(frozen=True)
class DecayConstants:
    """Phenomenological per-coherence decay times (seconds).

    rho23_model selects the zero/double-quantum decay shape:
    "exponential" exp(-t/t_c) (default) or "gaussian" exp(-(t/t_c)^2).
    """

    t1e: float = 5.6e-3
    t2e: float = 120e-6
    t2n_star: float = 24.3e-6
    t_c: float = 200e-9
    rho23_model: str = "exponential"

    def __post_init__(self):
        for name in ("t1e", "t2e", "t2n_star", "t_c"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.rho23_model not in ("exponential", "gaussian"):
            raise DomainError(f"unknown rho23_model {self.rho23_model!r}")
        if not (self.t_c < self.t2n_star < self.t2e < self.t1e):
            warnings.warn(
                "decay constants do not satisfy t_c < T2n* < T2e < T1e",
                DecayHierarchyWarning, stacklevel=3)
        # Schur-channel complete positivity needs the factor matrix PSD for
        # all t, which for exponential rates holds iff
        # |1/T2n* - 1/T2e| <= 1/t_c <= 1/T2n* + 1/T2e.
        n, e, c = 1.0 / self.t2n_star, 1.0 / self.t2e, 1.0 / self.t_c
        if not (abs(n - e) <= c <= n + e):
            side = "faster" if c > n + e else "slower"
            warnings.warn(
                f"1/t_c = {c:.3g}/s is {side} than the PSD window "
                f"[{abs(n - e):.3g}, {n + e:.3g}]; the dephasing map is "
                "phenomenological, not completely positive",
                ChannelPositivityWarning, stacklevel=3)

    def zq_dq_factor(self, duration: float) -> float:
        """lambda(t) applied to the (2,3) and (1,4) coherences."""
        x = duration / self.t_c
        return math.exp(-x * x) if self.rho23_model == "gaussian" else math.exp(-x)

    def factor_matrix(self, duration: float, channels=ALL_CHANNELS) -> np.ndarray:
        """Elementwise multipliers for the density matrix after a wait."""
        f = np.ones((4, 4))
        values = {
            "electron": math.exp(-duration / self.t2e),
            "nuclear": math.exp(-duration / self.t2n_star),
            "zq_dq": self.zq_dq_factor(duration),
        }
        for channel in channels:
            for i, j in CHANNEL_PAIRS[channel]:
                f[i - 1, j - 1] = values[channel]
                f[j - 1, i - 1] = values[channel]
        return f


def paper_decay_constants(rho23_model: str = "exponential") -> DecayConstants:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ChannelPositivityWarning)
        return DecayConstants(rho23_model=rho23_model)


@dataclass(frozen=True)
class SpinSystem:
    """Electron-nuclear Hamiltonian parameters plus decay constants.

    omega_e/omega_i are Zeeman angular frequencies (rad/s), a_hz the
    isotropic hyperfine constant (Hz), epsilon the initial electron
    polarization deviation.
    """

    omega_e: float
    omega_i: float
    a_hz: float
    decay: DecayConstants = field(default_factory=paper_decay_constants)
    epsilon: float = PAPER_EPSILON

    def __post_init__(self):
        if self.a_hz <= 0 or self.omega_e <= 0:
            raise DomainError("need a_hz > 0 and omega_e > 0")
        if not 0.0 < self.epsilon < 0.25:
            raise DomainError("epsilon must lie in (0, 0.25)")


def hamiltonian_en(sys: SpinSystem) -> np.ndarray:
    """H = omega_e Sz - omega_i Iz + 2 pi a S.I   (rad/s)."""
    sz = PAULIS[2] / 2.0
    h = sys.omega_e * kron(sz, IDENTITY_2) - sys.omega_i * kron(IDENTITY_2, sz)
    for s in PAULIS:
        h = h + 2.0 * math.pi * sys.a_hz * 0.25 * kron(s, s)
    return h


def _labeled_energies(sys: SpinSystem) -> dict:
    """Energies (rad/s) of the dressed levels matched to the product labels."""
    w, v = eig_hermitian(hamiltonian_en(sys))
    energies = {}
    taken = set()
    for level in (1, 2, 3, 4):
        overlaps = np.abs(v[level - 1, :]) ** 2
        best = max((k for k in range(4) if k not in taken),
                   key=lambda k: overlaps[k])
        taken.add(best)
        energies[level] = float(w[best])
    return energies


def transition_frequencies(sys: SpinSystem) -> dict:
    """The four named transition frequencies in Hz from exact diagonalization."""
    e = _labeled_energies(sys)
    return {name: abs(e[i] - e[j]) / (2.0 * math.pi)
            for name, (i, j) in TRANSITIONS.items()}


def electron_zeeman_for_mw1(target_mw1_hz: float,
                            a_hz: float = PAPER_HYPERFINE_HZ,
                            nuclear_ratio: float = NUCLEAR_TO_ELECTRON_RATIO) -> float:
    """omega_e (rad/s) such that the MW1 line sits at the target frequency.

    The nuclear Zeeman frequency is tied to the electron one by the
    gyromagnetic ratio (both scale with the same static field).
    """

    def mw1_of(f_e):
        sys = SpinSystem(omega_e=2.0 * math.pi * f_e,
                         omega_i=2.0 * math.pi * f_e * nuclear_ratio,
                         a_hz=a_hz)
        return transition_frequencies(sys)["MW1"] - target_mw1_hz

    f_e = brentq(mw1_of, target_mw1_hz, target_mw1_hz + 2.0 * a_hz, xtol=1e-3)
    return 2.0 * math.pi * f_e


def paper_system(decay: DecayConstants | None = None,
                 epsilon: float = PAPER_EPSILON) -> SpinSystem:
    """SpinSystem fitted so MW1 matches the measured 9.701 GHz line."""
    omega_e = electron_zeeman_for_mw1(PAPER_MW1_HZ)
    return SpinSystem(omega_e=omega_e,
                      omega_i=omega_e * NUCLEAR_TO_ELECTRON_RATIO,
                      a_hz=PAPER_HYPERFINE_HZ,
                      decay=decay if decay is not None else paper_decay_constants(),
                      epsilon=epsilon)


def _check_transition(transition) -> tuple:
    pair = tuple(int(x) for x in transition)
    if pair not in _ALLOWED_PAIRS:
        raise BadTransitionError(
            f"transition {pair} not in {sorted(_ALLOWED_PAIRS)}")
    return pair


def rotation_unitary(transition, angle: float, phase: float = 0.0) -> np.ndarray:
    """Selective rotation embedded in the driven doublet, identity elsewhere."""
    i, j = _check_transition(transition)
    i -= 1
    j -= 1
    u = np.eye(4, dtype=np.complex128)
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    u[i, i] = c
    u[j, j] = c
    u[i, j] = -1j * s * complex(math.cos(phase), -math.sin(phase))
    u[j, i] = -1j * s * complex(math.cos(phase), math.sin(phase))
    return u


def apply_rotation(rho, transition, angle: float, phase: float = 0.0) -> np.ndarray:
    """U rho U^dag for the selective rotation; trace and spectrum preserved."""
    u = rotation_unitary(transition, angle, phase)
    return u @ np.asarray(rho, dtype=np.complex128) @ u.conj().T


def apply_dephasing(rho, duration: float, decay: DecayConstants,
                    channels=ALL_CHANNELS) -> np.ndarray:
    """Multiply each off-diagonal element by its per-coherence decay factor."""
    if duration < 0:
        raise DomainError("duration must be >= 0")
    return np.asarray(rho, dtype=np.complex128) * decay.factor_matrix(duration, channels)


def apply_population_relaxation(rho, duration: float,
                                decay: DecayConstants) -> np.ndarray:
    """Identity placeholder: sequences are far shorter than T1e (5.6 ms)."""
    return np.asarray(rho, dtype=np.complex128)


def initial_thermal_state(sys: SpinSystem) -> np.ndarray:
    """rho0 = 1/4 + 2 eps Sz (x) 1: excess population on levels 1 and 2."""
    eps = sys.epsilon
    return np.diag(np.array(
        [0.25 + eps, 0.25 + eps, 0.25 - eps, 0.25 - eps], dtype=np.complex128))


@dataclass(frozen=True)
class Rotate:
    transition: tuple
    angle: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "transition", _check_transition(self.transition))


@dataclass(frozen=True)
class Wait:
    duration: float
    channel: str = "all"

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError("wait duration must be >= 0")
        if self.channel not in WAIT_CHANNELS:
            raise DomainError(f"channel must be one of {WAIT_CHANNELS}")


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple

    def __post_init__(self):
        for step in self.steps:
            if not isinstance(step, (Rotate, Wait)):
                raise DomainError(f"unsupported step {step!r}")


def run_sequence(rho, sequence: PulseSequence, decay: DecayConstants) -> np.ndarray:
    """Evolve a state through the sequence, strictly in order."""
    state = np.asarray(rho, dtype=np.complex128)
    for step in sequence.steps:
        if isinstance(step, Rotate):
            state = apply_rotation(state, step.transition, step.angle, step.phase)
        else:
            channels = ALL_CHANNELS if step.channel == "all" else (step.channel,)
            state = apply_dephasing(state, step.duration, decay, channels)
    return state


def sequence_to_json(sequence: PulseSequence) -> str:
    """Serialize to the documented JSON step array (angles in degrees)."""
    steps = []
    for step in sequence.steps:
        if isinstance(step, Rotate):
            steps.append({"op": "rotate", "transition": list(step.transition),
                          "angle_deg": math.degrees(step.angle),
                          "phase_deg": math.degrees(step.phase)})
        else:
            steps.append({"op": "wait", "duration_s": step.duration,
                          "channel": step.channel})
    return json.dumps(steps, indent=2, sort_keys=True) + "\n"


def sequence_from_json(text: str) -> PulseSequence:
    """Parse the JSON step array; angles are degrees in the file format."""
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise DomainError("sequence JSON must be an array of step objects")
    steps = []
    for entry in raw:
        op = entry.get("op")
        if op == "rotate":
            steps.append(Rotate(transition=tuple(entry["transition"]),
                                angle=math.radians(float(entry["angle_deg"])),
                                phase=math.radians(float(entry.get("phase_deg", 0.0)))))
        elif op == "wait":
            steps.append(Wait(duration=float(entry["duration_s"]),
                              channel=entry.get("channel", "all")))
        else:
            raise DomainError(f"unknown op {op!r} in sequence JSON")
    return PulseSequence(tuple(steps))


def build_preparation_sequence(sys: SpinSystem, theta: float, tau3: float,
                               sign: int = 1, tau1: float | None = None,
                               tau2: float | None = None) -> PulseSequence:
    """The Bell-diagonal preparation sequence (upper branch sign=+1).

    tau1/tau2 default to 20x the coherence time they are meant to exhaust,
    leaving residual coherences below e^-20.
    """
    if not 0.0 <= theta <= math.pi:
        raise DomainError("theta must lie in [0, pi]")
    if tau3 < 0:
        raise DomainError("tau3 must be >= 0")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if tau1 is None:
        tau1 = 20.0 * sys.decay.t2e
    if tau2 is None:
        tau2 = 20.0 * sys.decay.t2n_star

    if sign == 1:
        equalize, generate, mw_pi = (1, 2), (3, 4), (2, 4)
    else:
        equalize, generate, mw_pi = (3, 4), (1, 2), (1, 3)
    return PulseSequence((
        Rotate((2, 4), theta),
        Wait(tau1),
        Rotate(equalize, math.pi / 2.0),
        Wait(tau2),
        Rotate(generate, math.pi / 2.0, phase=math.pi),
        Rotate(mw_pi, math.pi),
        Wait(tau3),
    ))


def predicted_cvector(sys: SpinSystem, theta: float, tau3: float,
                      sign: int = 1) -> CVector:
    """Closed-form c-vector of the prepared state."""
    lam = sys.decay.zq_dq_factor(tau3)
    eps = sys.epsilon
    cxy = -eps * (1.0 - math.cos(theta)) * lam
    cz = sign * 2.0 * eps * (1.0 + math.cos(theta))
    return CVector(cxy, cxy, cz)


class PreparationResult(NamedTuple):
    rho: np.ndarray
    predicted: CVector
    sequence: PulseSequence


def prepare_bell_diagonal(sys: SpinSystem, theta: float, tau3: float,
                          sign: int = 1, tau1: float | None = None,
                          tau2: float | None = None) -> PreparationResult:
    """Simulate the preparation sequence and return the state + prediction."""
    sequence = build_preparation_sequence(sys, theta, tau3, sign, tau1, tau2)
    rho = run_sequence(initial_thermal_state(sys), sequence, sys.decay)
    return PreparationResult(rho, predicted_cvector(sys, theta, tau3, sign), sequence)


def invert_preparation(c_target, sys: SpinSystem):
    """Solve (theta, tau3, sign) reproducing a target Bell-diagonal c-vector.

    Requires cx = cy <= 0 and |cz| <= 4 eps reachable by the closed form.
    """
    cx, cy, cz = (float(v) for v in c_target)
    eps = sys.epsilon
    if abs(cx - cy) > 1e-12:
        raise DomainError("preparation always gives cx = cy")
    if cx > 0:
        raise DomainError("preparation gives cx <= 0")
    sign = 1 if cz >= 0 else -1
    cos_theta = abs(cz) / (2.0 * eps) - 1.0
    if not -1.0 <= cos_theta <= 1.0:
        raise DomainError("|cz| outside the reachable range [0, 4 eps]")
    theta = math.acos(cos_theta)
    if cx == 0.0:
        return theta, 0.0, sign
    denom = eps * (1.0 - cos_theta)
    if denom == 0.0:
        raise DomainError("cz = 4 eps forces cx = 0")
    lam = -cx / denom
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"required decay factor {lam:.3g} outside (0, 1]")
    x = -math.log(lam)
    tau3 = sys.decay.t_c * (math.sqrt(x) if sys.decay.rho23_model == "gaussian"
                            else x)
    return theta, tau3, sign
