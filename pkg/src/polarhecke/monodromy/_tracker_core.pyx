# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path-tracking kernel.

Same contract as ``_tracker_py.track_segment``.  The system size is small
(a handful of unknowns), so the linear algebra is done by hand on fixed
stack buffers.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fmin, sqrt, INFINITY

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)

cdef enum:
    MAXR = 8

SEG_LINE = 0
SEG_ARC = 1
SPACE_Q = 0
SPACE_C = 1
STATUS_OK = 0
STATUS_STEP_CAP = 1
STATUS_SINGULAR = 2

BACKEND = "cython"


cdef void _eval(const double complex[:] coef, const long long[:, :] exps,
                const long long[:] eq_start, int r, const double complex* a,
                double complex* f, double complex* jac) noexcept nogil:
    cdef int i, tt, k, j, e, q
    cdef double complex term, dterm, pw
    for i in range(r):
        f[i] = 0
        for k in range(r):
            jac[i * r + k] = 0
    for i in range(r):
        for tt in range(<int>eq_start[i], <int>eq_start[i + 1]):
            term = coef[tt]
            for k in range(r):
                for e in range(<int>exps[tt, k]):
                    term = term * a[k]
            f[i] = f[i] + term
            for k in range(r):
                e = <int>exps[tt, k]
                if e == 0:
                    continue
                dterm = coef[tt] * e
                for j in range(r):
                    pw = 1
                    if j == k:
                        for q in range(e - 1):
                            pw = pw * a[j]
                    else:
                        for q in range(<int>exps[tt, j]):
                            pw = pw * a[j]
                    dterm = dterm * pw
                jac[i * r + k] = jac[i * r + k] + dterm


cdef int _solve(int r, const double complex* m_in, const double complex* b_in,
                double complex* x, double* det_abs) noexcept nogil:
    """Gaussian elimination with partial pivoting; returns 0 if singular."""
    cdef double complex m[MAXR * MAXR]
    cdef double complex b[MAXR]
    cdef double complex tmp, fac
    cdef int i, j, k, piv
    cdef double best, v
    cdef double d = 1.0
    for i in range(r * r):
        m[i] = m_in[i]
    for i in range(r):
        b[i] = b_in[i]
    for k in range(r):
        piv = k
        best = cabs(m[k * r + k])
        for i in range(k + 1, r):
            v = cabs(m[i * r + k])
            if v > best:
                best = v
                piv = i
        if best == 0.0:
            det_abs[0] = 0.0
            return 0
        if piv != k:
            for j in range(r):
                tmp = m[k * r + j]
                m[k * r + j] = m[piv * r + j]
                m[piv * r + j] = tmp
            tmp = b[k]
            b[k] = b[piv]
            b[piv] = tmp
        d *= best
        for i in range(k + 1, r):
            fac = m[i * r + k] / m[k * r + k]
            for j in range(k, r):
                m[i * r + j] = m[i * r + j] - fac * m[k * r + j]
            b[i] = b[i] - fac * b[k]
    for i in range(r - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, r):
            tmp = tmp - m[i * r + j] * x[j]
        x[i] = tmp / m[i * r + i]
    det_abs[0] = d
    return 1


cdef double _norm(int r, const double complex* v) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(r):
        s += cabs(v[i]) * cabs(v[i])
    return sqrt(s)


cdef void _target(const double complex[:] coef, const long long[:, :] exps,
                  const long long[:] eq_start, int r, int kind, int space,
                  const double complex* c, const double complex* d,
                  double theta0, double dtheta, double t,
                  double complex* g, double complex* dg) noexcept nogil:
    cdef double complex p[MAXR]
    cdef double complex dp[MAXR]
    cdef double complex jac[MAXR * MAXR]
    cdef double complex e
    cdef int i, k
    if kind == 0:
        for i in range(r):
            p[i] = c[i] + t * d[i]
            dp[i] = d[i]
    else:
        e = cexp(1j * (theta0 + t * dtheta))
        for i in range(r):
            p[i] = c[i] + e * d[i]
            dp[i] = 1j * dtheta * e * d[i]
    if space == 0:
        for i in range(r):
            g[i] = p[i]
            dg[i] = dp[i]
        return
    _eval(coef, exps, eq_start, r, p, g, jac)
    for i in range(r):
        dg[i] = 0
        for k in range(r):
            dg[i] = dg[i] + jac[i * r + k] * dp[k]


def track_segment(coef, exps, eq_start, a0, int kind, int space, c, d,
                  double theta0, double dtheta, double h0=0.01, double h_max=0.02,
                  double tol=1e-10, long max_steps=100000, double h_min=1e-13,
                  int max_newton=8):
    """Euler predictor / Newton corrector along F(a(t)) = g(t), t in [0, 1].

    Returns (a_end, steps, min_abs_det, max_residual, status).
    """
    cdef double complex[:] coef_v = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef long long[:, :] exps_v = np.ascontiguousarray(exps, dtype=np.int64)
    cdef long long[:] start_v = np.ascontiguousarray(eq_start, dtype=np.int64)
    cdef double complex[:] a0_v = np.ascontiguousarray(a0, dtype=np.complex128)
    cdef double complex[:] c_v = np.ascontiguousarray(c, dtype=np.complex128)
    cdef double complex[:] d_v = np.ascontiguousarray(d, dtype=np.complex128)
    cdef int r = a0_v.shape[0]
    if r > MAXR:
        raise ValueError("system too large for the compiled kernel")
    cdef double complex a[MAXR]
    cdef double complex a1[MAXR]
    cdef double complex cc[MAXR]
    cdef double complex dd[MAXR]
    cdef double complex f[MAXR]
    cdef double complex jac[MAXR * MAXR]
    cdef double complex g[MAXR]
    cdef double complex dg[MAXR]
    cdef double complex da[MAXR]
    cdef double complex delta[MAXR]
    cdef double complex resv[MAXR]
    cdef int i, it, ok, status = 0
    cdef long steps = 0
    cdef double t = 0.0, t1, h, step_len, tol_eff, res = 0.0, nd, prev, det, det_acc
    cdef double min_det = INFINITY, max_res = 0.0
    cdef int first_seen
    for i in range(r):
        a[i] = a0_v[i]
        cc[i] = c_v[i]
        dd[i] = d_v[i]
    h = h0 if h0 < h_max else h_max
    with nogil:
        while t < 1.0:
            if steps >= max_steps:
                status = 1
                break
            if h > 1.0 - t:
                h = 1.0 - t
            _eval(coef_v, exps_v, start_v, r, a, f, jac)
            _target(coef_v, exps_v, start_v, r, kind, space, cc, dd, theta0, dtheta, t, g, dg)
            if not _solve(r, jac, dg, da, &det):
                status = 2
                min_det = 0.0
                break
            t1 = t + h
            if t1 > 1.0:
                t1 = 1.0
            _target(coef_v, exps_v, start_v, r, kind, space, cc, dd, theta0, dtheta, t1, g, dg)
            step_len = h * _norm(r, da)
            # residual tolerance is relative once the target is small
            tol_eff = tol * fmin(1.0, _norm(r, g))
            for i in range(r):
                a1[i] = a[i] + h * da[i]
            ok = 0
            prev = INFINITY
            first_seen = 0
            for it in range(max_newton):
                _eval(coef_v, exps_v, start_v, r, a1, f, jac)
                for i in range(r):
                    resv[i] = f[i] - g[i]
                res = _norm(r, resv)
                if res <= tol_eff:
                    ok = 1
                    break
                if not _solve(r, jac, resv, delta, &det):
                    break
                nd = _norm(r, delta)
                if it > 0 and nd > 0.5 * prev:
                    break
                if not first_seen:
                    first_seen = 1
                    if nd > 0.25 * step_len + 1e-9 * _norm(r, a1):
                        break
                prev = nd
                for i in range(r):
                    a1[i] = a1[i] - delta[i]
            if ok:
                for i in range(r):
                    a[i] = a1[i]
                t = t1
                steps += 1
                _solve(r, jac, resv, delta, &det_acc)
                if det_acc < min_det:
                    min_det = det_acc
                if res > max_res:
                    max_res = res
                h = 2.0 * h
                if h > h_max:
                    h = h_max
            else:
                h *= 0.5
                if h < h_min:
                    status = 2
                    break
    out = np.empty(r, dtype=np.complex128)
    for i in range(r):
        out[i] = a[i]
    return out, steps, min_det, max_res, status
