"""Quantum correlations of two-qubit states.

Closed-form and optimizer-based quantum discord for Bell-diagonal states,
thermal states of the two-qubit XXZ model with level-crossing/sudden-change
detection, and a simulator for the pulsed electron-nuclear preparation and
tomography of Bell-diagonal states.

The hot kernels (Jacobi eigensolver, measurement-optimization scan) run in
a compiled extension when available and fall back to pure numpy; see
``qcorr.backend.backend_name``.
"""

from qcorr.backend import backend_name
from qcorr.correlations import (
    DiscordResult,
    binary_h,
    classical_correlation,
    concurrence,
    concurrence_bell_diagonal,
    discord_bell_diagonal,
    discord_oracle,
    eof,
    eof_from_concurrence,
    mutual_information,
    von_neumann_entropy,
)
from qcorr.numerics import (
    EigenDecomposition,
    eig_hermitian,
    kron,
    matrix_exp_hermitian,
    partial_trace,
    trace_distance,
)
from qcorr.states import (
    CVector,
    bell_diagonal,
    bell_weights,
    c_vector_of,
    sample_physical_cvector,
    thermal_state,
    validate_density_matrix,
    weights_to_cvector,
)
from qcorr.xxzmodel import (
    LevelCrossing,
    SweepSeries,
    XxzSpectrum,
    hamiltonian,
    level_crossings,
    spectrum,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CVector",
    "DiscordResult",
    "EigenDecomposition",
    "LevelCrossing",
    "SweepSeries",
    "XxzSpectrum",
    "backend_name",
    "bell_diagonal",
    "bell_weights",
    "binary_h",
    "c_vector_of",
    "classical_correlation",
    "concurrence",
    "concurrence_bell_diagonal",
    "discord_bell_diagonal",
    "discord_oracle",
    "eig_hermitian",
    "eof",
    "eof_from_concurrence",
    "hamiltonian",
    "kron",
    "level_crossings",
    "matrix_exp_hermitian",
    "mutual_information",
    "partial_trace",
    "sample_physical_cvector",
    "spectrum",
    "sweep",
    "thermal_state",
    "trace_distance",
    "validate_density_matrix",
    "von_neumann_entropy",
    "weights_to_cvector",
]
