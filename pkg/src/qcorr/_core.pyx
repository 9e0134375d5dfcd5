# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic Jacobi eigensolver and the measurement scan.

Algorithm-for-algorithm twin of ``qcorr._core_py``; see that module for the
reference description.
"""

import numpy as np

from libc.math cimport cos, fabs, log, sin, sqrt

COMPILED = True

cdef double _LN2 = log(2.0)
cdef double _PI = 3.141592653589793238462643383279502884
cdef double _TINY = 2.2250738585072014e-308  # smallest normal double


def jacobi_eigh(matrix, int max_sweeps=100, double tol=1e-14):
    """Cyclic Jacobi diagonalization of a Hermitian matrix (dim <= 8).

    Returns (eigenvalues, eigenvectors, converged); eigenvalues unsorted,
    eigenvector k in column k. ``tol`` is relative to the Frobenius norm.
    """
    arr = np.array(matrix, dtype=np.complex128)
    cdef double complex[:, :] a_in = arr
    cdef int n = a_in.shape[0]
    cdef double complex a[8][8]
    cdef double complex v[8][8]
    cdef double complex col_p[8]
    cdef double complex col_q[8]
    cdef double complex vcol_p[8]
    cdef double complex vcol_q[8]
    cdef double complex apq, phase
    cdef double norm, stop, skip, off, mag, tau, t, c, s, app, aqq
    cdef int i, j, p, q, sweep
    cdef bint converged = False

    for i in range(n):
        for j in range(n):
            a[i][j] = a_in[i, j]
            v[i][j] = 1.0 if i == j else 0.0

    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm += a[i][j].real * a[i][j].real + a[i][j].imag * a[i][j].imag
    norm = sqrt(norm)
    stop = tol * (norm if norm > _TINY else _TINY)
    skip = 0.1 * stop / (n * n)

    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i][j].real * a[i][j].real + a[i][j].imag * a[i][j].imag
        off = sqrt(off)
        if off <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if mag <= skip:
                    continue
                phase = apq.conjugate() / mag
                tau = (a[q][q].real - a[p][p].real) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c

                app = a[p][p].real - t * mag
                aqq = a[q][q].real + t * mag

                for i in range(n):
                    col_p[i] = a[i][p]
                    col_q[i] = a[i][q]
                for i in range(n):
                    a[i][p] = c * col_p[i] - s * phase * col_q[i]
                    a[i][q] = s * col_p[i] + c * phase * col_q[i]
                for j in range(n):
                    a[p][j] = a[j][p].conjugate()
                    a[q][j] = a[j][q].conjugate()
                a[p][p] = app
                a[q][q] = aqq
                a[p][q] = 0.0
                a[q][p] = 0.0

                for i in range(n):
                    vcol_p[i] = v[i][p]
                    vcol_q[i] = v[i][q]
                for i in range(n):
                    v[i][p] = c * vcol_p[i] - s * phase * vcol_q[i]
                    v[i][q] = s * vcol_p[i] + c * phase * vcol_q[i]

    if not converged:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i][j].real * a[i][j].real + a[i][j].imag * a[i][j].imag
        converged = sqrt(off) <= stop

    w_out = np.empty(n, dtype=np.float64)
    v_out = np.empty((n, n), dtype=np.complex128)
    cdef double[:] w_view = w_out
    cdef double complex[:, :] v_view = v_out
    for i in range(n):
        w_view[i] = a[i][i].real
        for j in range(n):
            v_view[i, j] = v[i][j]
    return w_out, v_out, bool(converged)


cdef inline double _h_of(double r) noexcept nogil:
    if r >= 1.0:
        return 0.0
    if r <= 0.0:
        return 1.0
    cdef double p = 0.5 * (1.0 + r)
    cdef double q = 1.0 - p
    if q <= 0.0:  # (1+r)/2 can round to 1 for r within one ulp of 1
        return 0.0
    return -(p * log(p) + q * log(q)) / _LN2


cdef double _g_point(double ax, double ay, double az,
                     double bx, double by, double bz,
                     double[3][3] t, double theta, double phi) noexcept nogil:
    cdef double st = sin(theta)
    cdef double nx = st * cos(phi)
    cdef double ny = st * sin(phi)
    cdef double nz = cos(theta)
    cdef double tnx = t[0][0] * nx + t[0][1] * ny + t[0][2] * nz
    cdef double tny = t[1][0] * nx + t[1][1] * ny + t[1][2] * nz
    cdef double tnz = t[2][0] * nx + t[2][1] * ny + t[2][2] * nz
    cdef double bn = bx * nx + by * ny + bz * nz
    cdef double pp = 0.5 * (1.0 + bn)
    cdef double pm = 1.0 - pp
    cdef double g = 0.0
    cdef double ux, uy, uz, r
    if pp > 1e-15:
        ux = ax + tnx
        uy = ay + tny
        uz = az + tnz
        r = sqrt(ux * ux + uy * uy + uz * uz) / (2.0 * pp)
        g += pp * _h_of(r)
    if pm > 1e-15:
        ux = ax - tnx
        uy = ay - tny
        uz = az - tnz
        r = sqrt(ux * ux + uy * uy + uz * uz) / (2.0 * pm)
        g += pm * _h_of(r)
    return g


def measurement_entropy_scan(a, b, tmat, int n_theta, int n_phi, int refine_iters):
    """Minimize the post-measurement conditional entropy over Bloch directions.

    Returns (min_value, theta, phi); see the pure twin for conventions.
    """
    cdef double[:] a_v = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:] b_v = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[:, :] t_v = np.ascontiguousarray(tmat, dtype=np.float64)
    cdef double t[3][3]
    cdef double ax = a_v[0], ay = a_v[1], az = a_v[2]
    cdef double bx = b_v[0], by = b_v[1], bz = b_v[2]
    cdef int i, j
    for i in range(3):
        for j in range(3):
            t[i][j] = t_v[i, j]

    cdef double best = 1e300
    cdef double best_theta = 0.0, best_phi = 0.0
    cdef double theta, phi, val
    cdef int it, ip
    with nogil:
        for it in range(n_theta):
            theta = (it + 0.5) * (_PI / n_theta)
            for ip in range(n_phi):
                phi = ip * (2.0 * _PI / n_phi)
                val = _g_point(ax, ay, az, bx, by, bz, t, theta, phi)
                if val < best:
                    best = val
                    best_theta = theta
                    best_phi = phi

    cdef double step_t = _PI / n_theta
    cdef double step_p = 2.0 * _PI / n_phi
    cdef double two_pi = 2.0 * _PI
    cdef double cand
    cdef bint moved
    cdef int k, d
    with nogil:
        for k in range(refine_iters):
            moved = False
            for d in range(2):
                cand = best_theta + (step_t if d == 0 else -step_t)
                if cand < 0.0:
                    cand = 0.0
                if cand > _PI:
                    cand = _PI
                val = _g_point(ax, ay, az, bx, by, bz, t, cand, best_phi)
                if val < best:
                    best = val
                    best_theta = cand
                    moved = True
            for d in range(2):
                cand = best_phi + (step_p if d == 0 else -step_p)
                if cand >= two_pi:
                    cand -= two_pi
                if cand < 0.0:
                    cand += two_pi
                val = _g_point(ax, ay, az, bx, by, bz, t, best_theta, cand)
                if val < best:
                    best = val
                    best_phi = cand
                    moved = True
            if not moved:
                step_t *= 0.5
                step_p *= 0.5
                if step_t < 1e-12 and step_p < 1e-12:
                    break
    return best, best_theta, best_phi
