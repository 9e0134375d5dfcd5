"""Kernel backend selection.

The compiled extension ``qcorr._core`` is preferred when importable; the
pure-numpy twin ``qcorr._core_py`` is the fallback. Setting the environment
variable ``QCORR_PURE_PYTHON=1`` forces the fallback (useful for the
benchmark and for debugging).
"""

import os

if os.environ.get("QCORR_PURE_PYTHON"):
    from qcorr import _core_py as core
else:
    try:
        from qcorr import _core as core  # type: ignore[no-redef]
    except ImportError:
        from qcorr import _core_py as core  # type: ignore[no-redef]

jacobi_eigh = core.jacobi_eigh
measurement_entropy_scan = core.measurement_entropy_scan


def backend_name() -> str:
    """Name of the active kernel backend: "compiled" or "python"."""
    return "compiled" if core.COMPILED else "python"
