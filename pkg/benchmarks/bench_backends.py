"""Benchmark the compiled kernels against the pure-Python fallback.

Run from the repository root after an editable install:

    python3 benchmarks/bench_backends.py

Both backends are imported directly (the QCORR_PURE_PYTHON switch is not
needed), so this also smoke-tests that their results agree.
"""

import time

import numpy as np

from qcorr import _core_py

try:
    from qcorr import _core
except ImportError:
    _core = None


def bench(fn, repeat):
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat


def main():
    rng = np.random.Generator(np.random.PCG64(1))
    herms = []
    for _ in range(64):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        herms.append(0.5 * (g + g.conj().T))

    # an off-axis correlation structure so the scan has real work to do
    a = np.array([0.1, -0.05, 0.2])
    b = np.array([-0.15, 0.1, 0.05])
    t = np.array([[0.3, 0.1, 0.0], [-0.05, -0.25, 0.1], [0.02, 0.0, 0.4]])

    cases = [
        ("jacobi_eigh (64 x 4x4 Hermitian)",
         lambda mod: [mod.jacobi_eigh(m) for m in herms], 20),
        ("measurement scan (64x128 grid + 50 refine)",
         lambda mod: mod.measurement_entropy_scan(a, b, t, 64, 128, 50), 20),
    ]

    print(f"{'kernel':45s} {'pure':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, runner, repeat in cases:
        t_pure = bench(lambda: runner(_core_py), repeat)
        if _core is None:
            print(f"{name:45s} {t_pure * 1e3:9.3f} ms {'n/a':>12s} {'n/a':>9s}")
            continue
        t_comp = bench(lambda: runner(_core), repeat)
        check_p = runner(_core_py)
        check_c = runner(_core)
        if name.startswith("measurement"):
            assert abs(check_p[0] - check_c[0]) < 1e-10, "backends disagree"
        print(f"{name:45s} {t_pure * 1e3:9.3f} ms {t_comp * 1e3:9.3f} ms "
              f"{t_pure / t_comp:8.1f}x")

    if _core is None:
        print("\ncompiled extension not built; showing pure timings only")


if __name__ == "__main__":
    main()
