"""Hot numeric kernels, each in a numba build and a pure-numpy build.

The numba builds are plain loops over preallocated arrays; the numpy builds
are vectorized re-statements of the same arithmetic. Dispatchers at the
bottom pick the live build once, based on the import-time backend switch.
Both builds of a kernel must agree to floating-point roundoff; the test
suite asserts this.
"""

import numpy as np

from ._accel import NUMBA_ENABLED, njit

_BM_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# B-spline design matrix (clamped knot vector, Cox-de Boor recurrence)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _design_matrix_nb(knots, degree, values, out):
    n = values.shape[0]
    nb = knots.shape[0] - degree - 1
    lo = knots[degree]
    hi = knots[nb]
    left = np.empty(degree + 1)
    right = np.empty(degree + 1)
    work = np.empty(degree + 1)
    for u in range(n):
        x = values[u]
        if x < lo:
            x = lo
        elif x > hi:
            x = hi
        if x >= hi:
            span = nb - 1
        else:
            a = degree
            b = nb
            while b - a > 1:
                mid = (a + b) // 2
                if x < knots[mid]:
                    b = mid
                else:
                    a = mid
            span = a
        work[0] = 1.0
        for j in range(1, degree + 1):
            left[j] = x - knots[span + 1 - j]
            right[j] = knots[span + j] - x
            saved = 0.0
            for r in range(j):
                temp = work[r] / (right[r + 1] + left[j - r])
                work[r] = saved + right[r + 1] * temp
                saved = left[j - r] * temp
            work[j] = saved
        for j in range(degree + 1):
            out[u, span - degree + j] = work[j]
    return out


def _design_matrix_np(knots, degree, values, out):
    n = values.shape[0]
    nb = knots.shape[0] - degree - 1
    lo = knots[degree]
    hi = knots[nb]
    x = np.clip(values, lo, hi)
    span = np.searchsorted(knots, x, side="right") - 1
    np.clip(span, degree, nb - 1, out=span)
    # triangular recurrence, all points at once
    basis = np.zeros((n, degree + 1))
    basis[:, 0] = 1.0
    left = np.empty((n, degree + 1))
    right = np.empty((n, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = x - knots[span + 1 - j]
        right[:, j] = knots[span + j] - x
        saved = np.zeros(n)
        for r in range(j):
            temp = basis[:, r] / (right[:, r + 1] + left[:, j - r])
            basis[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        basis[:, j] = saved
    cols = span[:, None] + np.arange(-degree, 1)[None, :]
    np.put_along_axis(out, cols, basis, axis=1)
    return out


# ---------------------------------------------------------------------------
# Per-pair eigenproblem core
#
# Inputs: Wy = By @ A00^{-1/2} precomputed on the response side, Bx the
# predictor design matrix, Z the contrast rows, kx the knot count. Output is
# the top eigenvalue of the sandwich matrix plus the pieces needed to apply
# the fitted transformations (response-side unit vector u, predictor-side
# coefficients eta, column means bm).
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _mc_core_nb(Wy, Bx, kx, Z, ridge):
    n, dx = Bx.shape
    dy = Wy.shape[1]
    dz = dx - 1
    bm = np.zeros(dx)
    for u in range(n):
        for m in range(dx):
            bm[m] += Bx[u, m]
    for m in range(dx):
        bm[m] /= n
    scale = np.empty(dx)
    for m in range(dx):
        b = bm[m]
        if b < _BM_FLOOR:
            b = _BM_FLOOR
        scale[m] = 1.0 / (kx * b)
    dmat = Z * scale
    psi = Bx @ dmat.T
    axx = psi.T @ psi
    for i in range(dz):
        for j in range(dz):
            axx[i, j] /= n
    tr = 0.0
    for i in range(dz):
        tr += axx[i, i]
    if not np.isfinite(tr) or tr <= 0.0:
        return 1, 0.0, np.zeros(dy), np.zeros(dz), bm, 0.0, 0
    wx, vx = np.linalg.eigh(axx)
    floor = ridge * tr / dz
    nfloor = 0
    for i in range(dz):
        if wx[i] < floor:
            wx[i] = floor
            nfloor += 1
    if wx[0] <= 0.0:
        return 1, 0.0, np.zeros(dy), np.zeros(dz), bm, 0.0, nfloor
    axx_is = (vx / np.sqrt(wx)) @ vx.T
    g = (Wy.T @ psi) / n
    c = g @ axx_is
    ctc = c.T @ c
    w2, v2 = np.linalg.eigh(ctc)
    lam = w2[dz - 1]
    v = v2[:, dz - 1].copy()
    big = 0
    for i in range(1, dz):
        if abs(v[i]) > abs(v[big]):
            big = i
    if v[big] < 0.0:
        for i in range(dz):
            v[i] = -v[i]
    if lam > 1e-300:
        sigma = np.sqrt(lam)
        u = (c @ v) / sigma
        eta = (axx_is @ v) * sigma
    else:
        sigma = 0.0
        u = np.zeros(dy)
        eta = np.zeros(dz)
    condx = wx[dz - 1] / wx[0]
    return 0, lam, u, eta, bm, condx, nfloor


def _mc_core_np(Wy, Bx, kx, Z, ridge):
    n, dx = Bx.shape
    dy = Wy.shape[1]
    dz = dx - 1
    bm = Bx.mean(axis=0)
    scale = 1.0 / (kx * np.maximum(bm, _BM_FLOOR))
    dmat = Z * scale
    psi = Bx @ dmat.T
    axx = psi.T @ psi / n
    tr = np.trace(axx)
    if not np.isfinite(tr) or tr <= 0.0:
        return 1, 0.0, np.zeros(dy), np.zeros(dz), bm, 0.0, 0
    wx, vx = np.linalg.eigh(axx)
    floor = ridge * tr / dz
    nfloor = int(np.sum(wx < floor))
    wx = np.maximum(wx, floor)
    if wx[0] <= 0.0:
        return 1, 0.0, np.zeros(dy), np.zeros(dz), bm, 0.0, nfloor
    axx_is = (vx / np.sqrt(wx)) @ vx.T
    g = (Wy.T @ psi) / n
    c = g @ axx_is
    ctc = c.T @ c
    w2, v2 = np.linalg.eigh(ctc)
    lam = w2[-1]
    v = v2[:, -1].copy()
    if v[np.argmax(np.abs(v))] < 0.0:
        v = -v
    if lam > 1e-300:
        sigma = np.sqrt(lam)
        u = (c @ v) / sigma
        eta = (axx_is @ v) * sigma
    else:
        u = np.zeros(dy)
        eta = np.zeros(dz)
    condx = wx[-1] / wx[0]
    return 0, float(lam), u, eta, bm, float(condx), nfloor


# ---------------------------------------------------------------------------
# Distance-correlation sums (streaming, no n x n matrices)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _dcor_sums_nb(x, y):
    n = x.shape[0]
    s_ab = 0.0
    s_aa = 0.0
    s_bb = 0.0
    ra = np.zeros(n)
    rb = np.zeros(n)
    for i in range(n):
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, n):
            a = abs(xi - x[j])
            b = abs(yi - y[j])
            s_ab += a * b
            s_aa += a * a
            s_bb += b * b
            ra[i] += a
            ra[j] += a
            rb[i] += b
            rb[j] += b
    return s_ab, s_aa, s_bb, ra, rb


def _dcor_sums_np(x, y, block=256):
    n = x.shape[0]
    s_ab = 0.0
    s_aa = 0.0
    s_bb = 0.0
    ra = np.zeros(n)
    rb = np.zeros(n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        a = np.abs(x[start:stop, None] - x[None, :])
        b = np.abs(y[start:stop, None] - y[None, :])
        s_ab += float(np.sum(a * b))
        s_aa += float(np.sum(a * a))
        s_bb += float(np.sum(b * b))
        ra += a.sum(axis=0)
        rb += b.sum(axis=0)
    # the blocked scalar sums count every ordered pair once, the pair loop
    # counts unordered pairs: halve the scalars; row sums already match
    return s_ab / 2.0, s_aa / 2.0, s_bb / 2.0, ra, rb


# ---------------------------------------------------------------------------
# Pearson correlation (0.0 when either side is constant or non-finite)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _pearson_nb(a, b):
    n = a.shape[0]
    ma = 0.0
    mb = 0.0
    for i in range(n):
        ma += a[i]
        mb += b[i]
    ma /= n
    mb /= n
    sab = 0.0
    saa = 0.0
    sbb = 0.0
    for i in range(n):
        da = a[i] - ma
        db = b[i] - mb
        sab += da * db
        saa += da * da
        sbb += db * db
    denom = np.sqrt(saa * sbb)
    if denom <= 0.0 or not np.isfinite(denom):
        return 0.0
    return sab / denom


def _pearson_np(a, b):
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(float(da @ da) * float(db @ db))
    if denom <= 0.0 or not np.isfinite(denom):
        return 0.0
    return float(da @ db) / denom


if NUMBA_ENABLED:
    design_matrix_kernel = _design_matrix_nb
    mc_core_kernel = _mc_core_nb
    dcor_sums_kernel = _dcor_sums_nb
    pearson_kernel = _pearson_nb
else:
    design_matrix_kernel = _design_matrix_np
    mc_core_kernel = _mc_core_np
    dcor_sums_kernel = _dcor_sums_np
    pearson_kernel = _pearson_np
