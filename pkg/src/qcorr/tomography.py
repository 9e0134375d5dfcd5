"""Simulated readout and density-matrix reconstruction.

Diagonal elements come from selective Rabi nutations after a full-dephasing
wait: the echo signal at nutation angle alpha on transition (i, j) is the
population change of the lower level,

    S(alpha) = (rho_jj - rho_ii) (1 - cos alpha) / 2,

zero baseline at alpha = 0. Every record is in detector units; amplitudes
are normalized by the electron-Rabi reference, whose physical value is
2 epsilon.

The rho_23 coherence is read out with a phase-cycled pi pulse on (2,4)
followed by a variable rotation phi on (3,4); with the echo signal
I = (pop_2 - pop_4)/2 the cycle differences satisfy

    I_{+x} - I_{-x} = -Re(rho_23) sin(phi)
    I_{+y} - I_{-y} = +Im(rho_23) sin(phi)

exactly, for any input state. The rho_14 variant uses the phi pulse on
(1,2) instead and carries the opposite signs (+Re, -Im).
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from qcorr import numerics
from qcorr.errors import (
    DegenerateGridError,
    DomainError,
    InconsistentRecordsError,
    NotHermitianError,
)
from qcorr.numerics import eig_hermitian, trace_distance
from qcorr.spinsim import PAPER_EPSILON, TRANSITIONS, apply_rotation, initial_thermal_state
from qcorr.states import validate_density_matrix

SCHEMA = "tomo/1"

# phase-cycle settings of the (2,4) pi pulse, in simulation order
PHASE_CYCLE = (("+x", 0.0), ("-x", math.pi), ("+y", math.pi / 2.0),
               ("-y", 3.0 * math.pi / 2.0))


@dataclass(frozen=True)
class NutationRecord:
    """Selective Rabi nutation signal over an angle axis (detector units)."""

    transition: tuple
    axis: np.ndarray
    signal: np.ndarray  # complex: in-phase + quadrature
    noise_sigma: float = 0.0

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        signal = np.asarray(self.signal, dtype=np.complex128)
        if axis.size == 0 or signal.shape != axis.shape:
            raise DomainError("axis and signal must be equal-length, nonempty")
        if axis.size > 1 and np.any(np.diff(axis) <= 0):
            raise DomainError("axis must be strictly increasing")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "signal", signal)
        object.__setattr__(self, "transition", tuple(int(x) for x in self.transition))


@dataclass(frozen=True)
class PhaseCycleRecord:
    """Four phase-cycled nutation series sharing one rotation-angle grid."""

    phi_grid: np.ndarray
    i_plus_x: np.ndarray
    i_minus_x: np.ndarray
    i_plus_y: np.ndarray
    i_minus_y: np.ndarray
    target: str = "rho23"  # which coherence the cycle addresses
    noise_sigma: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.phi_grid, dtype=float)
        object.__setattr__(self, "phi_grid", grid)
        for name in ("i_plus_x", "i_minus_x", "i_plus_y", "i_minus_y"):
            series = np.asarray(getattr(self, name), dtype=float)
            if series.shape != grid.shape:
                raise DomainError(f"{name} length differs from phi grid")
            object.__setattr__(self, name, series)
        if self.target not in ("rho23", "rho14"):
            raise DomainError(f"unknown target {self.target!r}")


@dataclass(frozen=True)
class ReconstructionReport:
    rho: np.ndarray
    raw: np.ndarray
    trace_distance_raw_to_physical: float
    normalization_amplitude: float


def _dephased(rho) -> np.ndarray:
    return np.diag(np.diag(np.asarray(rho, dtype=np.complex128)))


def simulate_diagonal_readout(rho, transition, axis, noise_sigma: float = 0.0,
                              rng: np.random.Generator | None = None) -> NutationRecord:
    """Nutation record for one transition after the tau_4 full dephasing.

    Gaussian noise of noise_sigma is added independently to the in-phase and
    quadrature components of each point (two draws per point, re then im).
    """
    rho = validate_density_matrix(rho)
    axis = np.asarray(axis, dtype=float)
    if axis.size == 0:
        raise DomainError("axis must be nonempty")
    i, j = transition
    base = _dephased(rho)
    signal = np.empty(axis.size, dtype=np.complex128)
    for k, alpha in enumerate(axis):
        rotated = apply_rotation(base, transition, float(alpha))
        signal[k] = (rotated[i - 1, i - 1] - base[i - 1, i - 1]).real
    if noise_sigma > 0.0:
        if rng is None:
            rng = np.random.default_rng()
        for k in range(axis.size):
            signal[k] += complex(rng.normal(0.0, noise_sigma),
                                 rng.normal(0.0, noise_sigma))
    return NutationRecord(tuple(transition), axis, signal, noise_sigma)


def _phase_cycle(rho, phi_pair, phi_grid, noise_sigma, rng, target):
    rho = validate_density_matrix(rho)
    grid = np.asarray(phi_grid, dtype=float)
    series = {}
    for label, chi in PHASE_CYCLE:
        vals = np.empty(grid.size)
        for k, phi in enumerate(grid):
            s1 = apply_rotation(rho, (2, 4), math.pi, chi)
            s2 = apply_rotation(s1, phi_pair, float(phi))
            vals[k] = 0.5 * (s2[1, 1] - s2[3, 3]).real
        if noise_sigma > 0.0:
            if rng is None:
                rng = np.random.default_rng()
            vals = vals + rng.normal(0.0, noise_sigma, size=grid.size)
        series[label] = vals
    return PhaseCycleRecord(grid, series["+x"], series["-x"], series["+y"],
                            series["-y"], target=target, noise_sigma=noise_sigma)


def simulate_rho23_readout(rho, phi_grid, noise_sigma: float = 0.0,
                           rng: np.random.Generator | None = None) -> PhaseCycleRecord:
    """Phase-cycled readout of rho_23: pi on (2,4), then phi on (3,4)."""
    return _phase_cycle(rho, (3, 4), phi_grid, noise_sigma, rng, "rho23")


def simulate_rho14_readout(rho, phi_grid, noise_sigma: float = 0.0,
                           rng: np.random.Generator | None = None) -> PhaseCycleRecord:
    """Phase-cycled readout of rho_14: pi on (2,4), then phi on (1,2)."""
    return _phase_cycle(rho, (1, 2), phi_grid, noise_sigma, rng, "rho14")


def fit_sine_amplitude(phi_grid, series):
    """Least-squares A for series ~ A sin(phi); returns (A, residual rms)."""
    phi = np.asarray(phi_grid, dtype=float)
    s = np.asarray(series, dtype=float)
    if phi.size < 3 or s.shape != phi.shape:
        raise DomainError("need >= 3 grid points and matching series")
    sines = np.sin(phi)
    denom = float(np.sum(sines * sines))
    if denom < 1e-12:
        raise DegenerateGridError("sum sin^2 < 1e-12: amplitude unidentifiable")
    amp = float(np.sum(s * sines)) / denom
    residual = float(np.sqrt(np.mean((s - amp * sines) ** 2)))
    return amp, residual


def fit_nutation_amplitude(record: NutationRecord):
    """Least-squares A for Re(signal) ~ A (1 - cos alpha)/2 = A g(alpha).

    A estimates the population difference rho_jj - rho_ii of the record's
    transition. Returns (A, residual rms).
    """
    g = 0.5 * (1.0 - np.cos(record.axis))
    denom = float(np.sum(g * g))
    if denom < 1e-12:
        raise DegenerateGridError("sum g^2 < 1e-12: amplitude unidentifiable")
    s = record.signal.real
    amp = float(np.sum(s * g)) / denom
    residual = float(np.sqrt(np.mean((s - amp * g) ** 2)))
    return amp, residual


def extract_coherence(record: PhaseCycleRecord) -> complex:
    """Complex coherence (detector units) from the cycle differences."""
    ax, _ = fit_sine_amplitude(record.phi_grid, record.i_plus_x - record.i_minus_x)
    ay, _ = fit_sine_amplitude(record.phi_grid, record.i_plus_y - record.i_minus_y)
    if record.target == "rho23":
        return complex(-ax, ay)
    return complex(ax, -ay)


def electron_rabi_reference(sys, axis, noise_sigma: float = 0.0,
                            rng: np.random.Generator | None = None) -> float:
    """|fitted amplitude| of the MW1 nutation on the thermal state (= 2 eps)."""
    record = simulate_diagonal_readout(initial_thermal_state(sys),
                                       TRANSITIONS["MW1"], axis, noise_sigma, rng)
    amp, _ = fit_nutation_amplitude(record)
    return abs(amp)


def _simplex_project(w: np.ndarray) -> np.ndarray:
    """Closest point of the probability simplex: uniform shift, clip at 0."""
    order = np.sort(w)[::-1]
    csum = np.cumsum(order)
    theta = 0.0
    for k in range(1, w.size + 1):
        cand = (csum[k - 1] - 1.0) / k
        if k == w.size or order[k] <= cand:
            theta = cand
            break
    return np.clip(w - theta, 0.0, None)


def project_to_physical(m) -> np.ndarray:
    """Nearest (Frobenius) unit-trace PSD matrix; eigenvectors unchanged."""
    m = numerics.as_complex_matrix(m)
    if not numerics.is_hermitian(m, 1e-8):
        raise NotHermitianError("projection input not Hermitian within 1e-8")
    m = 0.5 * (m + m.conj().T)
    w, v = eig_hermitian(m)
    w_proj = _simplex_project(w)
    return (v * w_proj) @ v.conj().T


_DIFF_ROWS = {
    (2, 4): np.array([0.0, -1.0, 0.0, 1.0]),
    (1, 3): np.array([-1.0, 0.0, 1.0, 0.0]),
    (1, 2): np.array([-1.0, 1.0, 0.0, 0.0]),
    (3, 4): np.array([0.0, 0.0, -1.0, 1.0]),
}


def reconstruct(diagonal_records, rho23: complex, rho14: complex,
                reference_amplitude: float, *,
                epsilon: float = PAPER_EPSILON) -> ReconstructionReport:
    """Assemble and physicalize the density matrix from measured amplitudes.

    ``diagonal_records`` is either four NutationRecords covering MW1, MW2,
    RF1, RF2 or a length-4 array of already-fitted populations. ``rho23``,
    ``rho14`` and the records are in detector units; the reference amplitude
    (the electron-Rabi line, physically 2 epsilon) converts them to absolute
    scale. The other off-diagonals are taken as exactly zero.
    """
    if reference_amplitude <= 0:
        raise DomainError("reference_amplitude must be positive")
    scale = 2.0 * epsilon / reference_amplitude

    records = list(diagonal_records)
    if all(isinstance(r, NutationRecord) for r in records):
        if len(records) != 4:
            raise DomainError("need exactly four diagonal records")
        rows = []
        diffs = []
        sigma = 0.0
        for record in records:
            pair = tuple(record.transition)
            if pair not in _DIFF_ROWS:
                raise DomainError(f"unsupported record transition {pair}")
            amp, _ = fit_nutation_amplitude(record)
            rows.append(_DIFF_ROWS[pair])
            diffs.append(amp)
            sigma = max(sigma, record.noise_sigma)
        rows.append(np.ones(4))
        diffs.append(0.0)
        dev, *_ = np.linalg.lstsq(np.array(rows), np.array(diffs), rcond=None)
        populations = 0.25 + dev * scale
        floor = 3.0 * sigma * scale + 1e-12
        if float(np.min(populations)) < -floor:
            raise InconsistentRecordsError(
                f"fitted population {np.min(populations):.3e} below -{floor:.3e}")
    else:
        populations = np.asarray(records, dtype=float)
        if populations.shape != (4,):
            raise DomainError("populations must be four values")
    populations = populations / float(np.sum(populations))

    raw = np.diag(populations.astype(np.complex128))
    r23 = complex(rho23) * scale
    r14 = complex(rho14) * scale
    raw[1, 2] = r23
    raw[2, 1] = np.conj(r23)
    raw[0, 3] = r14
    raw[3, 0] = np.conj(r14)

    rho = project_to_physical(raw)
    rho = validate_density_matrix(rho)
    return ReconstructionReport(
        rho=rho, raw=raw,
        trace_distance_raw_to_physical=trace_distance(raw, rho),
        normalization_amplitude=float(reference_amplitude))


def nutation_record_to_json(record: NutationRecord) -> str:
    doc = {"schema": SCHEMA, "kind": "nutation",
           "transition": list(record.transition),
           "noise_sigma": record.noise_sigma,
           "points": [{"angle": float(a), "signal_re": float(s.real),
                       "signal_im": float(s.imag)}
                      for a, s in zip(record.axis, record.signal)]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def nutation_record_from_json(text: str) -> NutationRecord:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA or doc.get("kind") != "nutation":
        raise DomainError("not a tomo/1 nutation record")
    axis = np.array([p["angle"] for p in doc["points"]], dtype=float)
    signal = np.array([complex(p["signal_re"], p["signal_im"])
                       for p in doc["points"]], dtype=np.complex128)
    return NutationRecord(tuple(doc["transition"]), axis, signal,
                          float(doc.get("noise_sigma", 0.0)))


def phase_cycle_record_to_json(record: PhaseCycleRecord) -> str:
    doc = {"schema": SCHEMA, "kind": "phase_cycle", "target": record.target,
           "noise_sigma": record.noise_sigma,
           "phi": [float(x) for x in record.phi_grid],
           "i_plus_x": [float(x) for x in record.i_plus_x],
           "i_minus_x": [float(x) for x in record.i_minus_x],
           "i_plus_y": [float(x) for x in record.i_plus_y],
           "i_minus_y": [float(x) for x in record.i_minus_y]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def phase_cycle_record_from_json(text: str) -> PhaseCycleRecord:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA or doc.get("kind") != "phase_cycle":
        raise DomainError("not a tomo/1 phase-cycle record")
    return PhaseCycleRecord(
        np.array(doc["phi"], dtype=float),
        np.array(doc["i_plus_x"], dtype=float),
        np.array(doc["i_minus_x"], dtype=float),
        np.array(doc["i_plus_y"], dtype=float),
        np.array(doc["i_minus_y"], dtype=float),
        target=doc.get("target", "rho23"),
        noise_sigma=float(doc.get("noise_sigma", 0.0)))


def report_to_json(report: ReconstructionReport) -> str:
    def matrix_entry(m):
        return [[[float(m[i, j].real), float(m[i, j].imag)] for j in range(4)]
                for i in range(4)]

    doc = {"schema": SCHEMA, "kind": "reconstruction",
           "rho": matrix_entry(report.rho), "raw": matrix_entry(report.raw),
           "trace_distance_raw_to_physical": report.trace_distance_raw_to_physical,
           "normalization_amplitude": report.normalization_amplitude}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
