"""Pure-Python fallback for the hot kernels in ``qcorr._core``.

Same algorithms, same iteration order and the same stopping rules as the
compiled extension, so results agree to rounding. The grid stage of the
measurement scan is vectorized with numpy; the refinement stage mirrors the
compiled scalar loop.
"""

import math

import numpy as np

COMPILED = False

_LN2 = math.log(2.0)


def jacobi_eigh(matrix, max_sweeps=100, tol=1e-14):
    """Cyclic Jacobi diagonalization of a Hermitian matrix (dim <= 8).

    One rotation per off-diagonal pair and sweep, pairs visited row-major
    (p < q). ``tol`` is relative to the Frobenius norm of the input.

    Returns (eigenvalues, eigenvectors, converged); eigenvalues unsorted,
    eigenvector k in column k.
    """
    a = np.array(matrix, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)

    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    stop = tol * max(norm, np.finfo(float).tiny)
    skip = 0.1 * stop / (n * n)

    converged = False
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        if off <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq.conjugate() / mag  # e^{-i arg(apq)}
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                app = a[p, p].real - t * mag
                aqq = a[q, q].real + t * mag

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * phase * col_q
                a[:, q] = s * col_p + c * phase * col_q
                a[p, :] = a[:, p].conjugate()
                a[q, :] = a[:, q].conjugate()
                a[p, p] = app
                a[q, q] = aqq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p - s * phase * vcol_q
                v[:, q] = s * vcol_p + c * phase * vcol_q

    if not converged:
        off = math.sqrt(float(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        converged = off <= stop

    return np.diag(a).real.copy(), v, converged


def _h_of(r):
    """Binary entropy (bits) of a qubit with Bloch length r, scalar path."""
    if r >= 1.0:
        return 0.0
    if r <= 0.0:
        return 1.0
    p = 0.5 * (1.0 + r)
    q = 1.0 - p
    if q <= 0.0:  # (1+r)/2 can round to 1 for r within one ulp of 1
        return 0.0
    return -(p * math.log(p) + q * math.log(q)) / _LN2


def _g_point(ax, ay, az, bx, by, bz, t, theta, phi):
    """Average conditional entropy of the unmeasured qubit for direction (theta, phi)."""
    st = math.sin(theta)
    nx = st * math.cos(phi)
    ny = st * math.sin(phi)
    nz = math.cos(theta)
    tnx = t[0][0] * nx + t[0][1] * ny + t[0][2] * nz
    tny = t[1][0] * nx + t[1][1] * ny + t[1][2] * nz
    tnz = t[2][0] * nx + t[2][1] * ny + t[2][2] * nz
    bn = bx * nx + by * ny + bz * nz
    pp = 0.5 * (1.0 + bn)
    pm = 1.0 - pp
    g = 0.0
    if pp > 1e-15:
        ux = ax + tnx
        uy = ay + tny
        uz = az + tnz
        r = math.sqrt(ux * ux + uy * uy + uz * uz) / (2.0 * pp)
        g += pp * _h_of(r)
    if pm > 1e-15:
        ux = ax - tnx
        uy = ay - tny
        uz = az - tnz
        r = math.sqrt(ux * ux + uy * uy + uz * uz) / (2.0 * pm)
        g += pm * _h_of(r)
    return g


def _h_array(r):
    r = np.clip(r, 0.0, 1.0)
    p = 0.5 * (1.0 + r)
    q = 1.0 - p
    out = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    out = out + np.where(q > 0.0, q * np.log(np.where(q > 0.0, q, 1.0)), 0.0)
    return -out / _LN2


def measurement_entropy_scan(a, b, tmat, n_theta, n_phi, refine_iters):
    """Minimize the post-measurement conditional entropy over Bloch directions.

    ``a``/``b`` are the Bloch vectors of the unmeasured/measured qubit and
    ``tmat`` the 3x3 correlation matrix (measurement contracts its second
    index). Coarse midpoint-theta x periodic-phi grid, then coordinate
    descent with step halving. Returns (min_value, theta, phi).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tmat = np.asarray(tmat, dtype=float)

    thetas = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
    phis = np.arange(n_phi) * (2.0 * math.pi / n_phi)

    st = np.sin(thetas)[:, None]
    ct = np.cos(thetas)[:, None]
    nx = st * np.cos(phis)[None, :]
    ny = st * np.sin(phis)[None, :]
    nz = ct * np.ones((1, n_phi))

    tnx = tmat[0, 0] * nx + tmat[0, 1] * ny + tmat[0, 2] * nz
    tny = tmat[1, 0] * nx + tmat[1, 1] * ny + tmat[1, 2] * nz
    tnz = tmat[2, 0] * nx + tmat[2, 1] * ny + tmat[2, 2] * nz
    bn = b[0] * nx + b[1] * ny + b[2] * nz
    pp = 0.5 * (1.0 + bn)
    pm = 1.0 - pp

    up = np.sqrt((a[0] + tnx) ** 2 + (a[1] + tny) ** 2 + (a[2] + tnz) ** 2)
    um = np.sqrt((a[0] - tnx) ** 2 + (a[1] - tny) ** 2 + (a[2] - tnz) ** 2)
    safe_pp = np.where(pp > 1e-15, pp, 1.0)
    safe_pm = np.where(pm > 1e-15, pm, 1.0)
    g = np.where(pp > 1e-15, pp * _h_array(up / (2.0 * safe_pp)), 0.0)
    g = g + np.where(pm > 1e-15, pm * _h_array(um / (2.0 * safe_pm)), 0.0)

    flat = int(np.argmin(g))
    best_theta = float(thetas[flat // n_phi])
    best_phi = float(phis[flat % n_phi])

    tlist = [[float(tmat[i, j]) for j in range(3)] for i in range(3)]
    args = (float(a[0]), float(a[1]), float(a[2]),
            float(b[0]), float(b[1]), float(b[2]), tlist)
    best = _g_point(*args, best_theta, best_phi)

    step_t = math.pi / n_theta
    step_p = 2.0 * math.pi / n_phi
    two_pi = 2.0 * math.pi
    for _ in range(refine_iters):
        moved = False
        for direction in (1.0, -1.0):
            cand = best_theta + direction * step_t
            cand = min(max(cand, 0.0), math.pi)
            val = _g_point(*args, cand, best_phi)
            if val < best:
                best = val
                best_theta = cand
                moved = True
        for direction in (1.0, -1.0):
            cand = best_phi + direction * step_p
            if cand >= two_pi:
                cand -= two_pi
            if cand < 0.0:
                cand += two_pi
            val = _g_point(*args, best_theta, cand)
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
