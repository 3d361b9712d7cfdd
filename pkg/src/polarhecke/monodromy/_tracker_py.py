"""Pure-Python (numpy) path-tracking kernel.

Same contract as the compiled ``_tracker_core``: the square polynomial
system is passed as flat arrays (``coef``, ``exps`` with one row per term,
``eq_start`` offsets per equation) and one path segment is tracked from
t = 0 to t = 1.
"""

from __future__ import annotations

import math

import numpy as np

SEG_LINE = 0
SEG_ARC = 1
SPACE_Q = 0
SPACE_C = 1

STATUS_OK = 0
STATUS_STEP_CAP = 1
STATUS_SINGULAR = 2

BACKEND = "python"


def eval_system(coef, exps, eq_start, a):
    """F(a) and the Jacobian J(a) of the packed system."""
    r = a.shape[0]
    terms = np.prod(a[None, :] ** exps, axis=1)
    vals = coef * terms
    f = np.add.reduceat(vals, eq_start[:-1]) if len(vals) else np.zeros(r, complex)
    jac = np.zeros((r, r), dtype=complex)
    for k in range(r):
        e = exps[:, k]
        mask = e > 0
        if not mask.any():
            continue
        shifted = exps[mask].copy()
        shifted[:, k] -= 1
        d = coef[mask] * e[mask] * np.prod(a[None, :] ** shifted, axis=1)
        rows = np.searchsorted(eq_start, np.nonzero(mask)[0], side="right") - 1
        np.add.at(jac[:, k], rows, d)
    return f, jac


def _point(kind, c, d, theta0, dtheta, t):
    if kind == SEG_LINE:
        return c + t * d, d
    e = np.exp(1j * (theta0 + t * dtheta))
    return c + e * d, 1j * dtheta * e * d


def _target(coef, exps, eq_start, kind, space, c, d, theta0, dtheta, t):
    p, dp = _point(kind, c, d, theta0, dtheta, t)
    if space == SPACE_Q:
        return p, dp
    f, jac = eval_system(coef, exps, eq_start, p)
    return f, jac @ dp


def track_segment(
    coef,
    exps,
    eq_start,
    a0,
    kind,
    space,
    c,
    d,
    theta0,
    dtheta,
    h0=0.01,
    h_max=0.02,
    tol=1e-10,
    max_steps=100000,
    h_min=1e-13,
    max_newton=8,
):
    """Euler predictor / Newton corrector along F(a(t)) = g(t), t in [0, 1].

    Returns (a_end, steps, min_abs_det, max_residual, status).
    """
    coef = np.asarray(coef, dtype=complex)
    exps = np.asarray(exps, dtype=np.int64)
    eq_start = np.asarray(eq_start, dtype=np.int64)
    c = np.asarray(c, dtype=complex)
    d = np.asarray(d, dtype=complex)
    a = np.array(a0, dtype=complex)
    t = 0.0
    h = min(h0, h_max)
    steps = 0
    min_det = math.inf
    max_res = 0.0
    while t < 1.0:
        if steps >= max_steps:
            return a, steps, min_det, max_res, STATUS_STEP_CAP
        h = min(h, 1.0 - t)
        f0, j0 = eval_system(coef, exps, eq_start, a)
        _, dg = _target(coef, exps, eq_start, kind, space, c, d, theta0, dtheta, t)
        try:
            da = np.linalg.solve(j0, dg)
        except np.linalg.LinAlgError:
            return a, steps, 0.0, max_res, STATUS_SINGULAR
        t1 = min(t + h, 1.0)
        g1, _ = _target(coef, exps, eq_start, kind, space, c, d, theta0, dtheta, t1)
        step_len = h * np.linalg.norm(da)
        # residual tolerance is relative once the target is small
        tol_eff = tol * min(1.0, np.linalg.norm(g1))
        a1 = a + h * da
        ok = False
        prev = math.inf
        first = None
        for it in range(max_newton):
            f1, j1 = eval_system(coef, exps, eq_start, a1)
            res = np.linalg.norm(f1 - g1)
            if res <= tol_eff:
                ok = True
                break
            try:
                delta = np.linalg.solve(j1, f1 - g1)
            except np.linalg.LinAlgError:
                break
            nd = np.linalg.norm(delta)
            if it > 0 and nd > 0.5 * prev:
                break
            if first is None:
                first = nd
                # a large first correction means the predictor left the path
                if nd > 0.25 * step_len + 1e-9 * np.linalg.norm(a1):
                    break
            prev = nd
            a1 = a1 - delta
        if ok:
            a = a1
            t = t1
            steps += 1
            det = abs(np.linalg.det(j1))
            if det < min_det:
                min_det = det
            if res > max_res:
                max_res = res
            h = min(2.0 * h, h_max)
        else:
            h *= 0.5
            if h < h_min:
                return a, steps, min_det, max_res, STATUS_SINGULAR
    return a, steps, min_det, max_res, STATUS_OK
