"""Hot loops: connection evaluation and Dormand-Prince 5(4) integration.

The functions are compiled with numba when it is importable and the
environment variable ``PFAFFIAN_KERNELS`` is not ``numpy``.  Otherwise the
same integrator runs as plain Python and matrix evaluation uses vectorized
numpy.  Both paths share the step-size controller and tableau, so results
agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

_WANT_NUMPY = os.environ.get("PFAFFIAN_KERNELS", "").strip().lower() == "numpy"

try:
    if _WANT_NUMPY:
        raise ImportError
    from numba import njit as _njit

    BACKEND = "numba"

    def jit(fn):
        return _njit(cache=True)(fn)
except ImportError:
    BACKEND = "numpy"

    def jit(fn):
        return fn


STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2
STATUS_COLLISION = 3

RHS_LINEAR = 0
RHS_SCHLESINGER = 1

PATH_LINE = 0
PATH_ARC = 1

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9
_A21 = 1.0 / 5
_A31, _A32 = 3.0 / 40, 9.0 / 40
_A41, _A42, _A43 = 44.0 / 45, -56.0 / 15, 32.0 / 9
_A51, _A52, _A53, _A54 = 19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729
_A61, _A62, _A63, _A64, _A65 = 9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, \
    -5103.0 / 18656
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                                22.0 / 525, -1.0 / 40)


@jit
def path_point(pkind, p0, p1, pcoord, pr, th0, th1, s):
    """Point and velocity at parameter ``s`` in [0, 1] of a line or an arc."""
    m = p0.shape[0]
    t = np.empty(m, dtype=np.complex128)
    v = np.zeros(m, dtype=np.complex128)
    if pkind == PATH_LINE:
        for i in range(m):
            t[i] = p0[i] + s * (p1[i] - p0[i])
            v[i] = p1[i] - p0[i]
    else:
        th = th0 + s * (th1 - th0)
        e = np.exp(1j * th)
        for i in range(m):
            t[i] = p0[i]
        t[pcoord] = p0[pcoord] + pr * e
        v[pcoord] = 1j * pr * e * (th1 - th0)
    return t, v


@jit
def _ipow(z, e):
    out = 1.0 + 0.0j
    if e >= 0:
        for _ in range(e):
            out *= z
    else:
        zi = 1.0 / z
        for _ in range(-e):
            out *= zi
    return out


@jit
def _monomials_loop(exps, t):
    T, m = exps.shape
    mon = np.empty(T, dtype=np.complex128)
    for a in range(T):
        z = 1.0 + 0.0j
        for i in range(m):
            if exps[a, i] != 0:
                z *= _ipow(t[i], exps[a, i])
        mon[a] = z
    return mon


def _monomials_numpy(exps, t):
    if exps.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.prod(t[None, :] ** exps, axis=1)


_monomials = _monomials_loop if BACKEND == "numba" else _monomials_numpy


@jit
def _connection_matrix_loop(exps, coef, dexps, dcoef, poles, pres, pole_coord, t, v):
    """``sum_s Omega_s(t) v_s`` for ``Omega = N/F + sum_p R_p dt_c/(t_c - p)``."""
    n = coef.shape[2] if coef.shape[0] > 0 else pres.shape[1]
    out = np.zeros((n, n), dtype=np.complex128)
    T = exps.shape[0]
    if T > 0:
        mon = _monomials(exps, t)
        m = exps.shape[1]
        for a in range(T):
            for s in range(m):
                w = mon[a] * v[s]
                if w != 0:
                    out += w * coef[a, s]
        if dexps.shape[0] > 0:
            dm = _monomials(dexps, t)
            den = 0.0 + 0.0j
            for a in range(dexps.shape[0]):
                den += dcoef[a] * dm[a]
            out = out / den
    for p in range(poles.shape[0]):
        out += pres[p] * (v[pole_coord] / (t[pole_coord] - poles[p]))
    return out


def _connection_matrix_numpy(exps, coef, dexps, dcoef, poles, pres, pole_coord, t, v):
    n = coef.shape[2] if coef.shape[0] > 0 else pres.shape[1]
    out = np.zeros((n, n), dtype=np.complex128)
    if exps.shape[0] > 0:
        mon = _monomials_numpy(exps, t)
        out = np.einsum("a,s,asij->ij", mon, v, coef)
        if dexps.shape[0] > 0:
            out = out / np.dot(dcoef, _monomials_numpy(dexps, t))
    if poles.shape[0] > 0:
        out = out + np.einsum("p,pij->ij", v[pole_coord] / (t[pole_coord] - poles), pres)
    return out


connection_matrix = _connection_matrix_loop if BACKEND == "numba" else _connection_matrix_numpy


@jit
def _schlesinger_rhs(y, lam, dlam, n):
    k = lam.shape[0]
    A = y.reshape((k, n, n))
    out = np.zeros((k, n, n), dtype=np.complex128)
    for s in range(k):
        for j in range(k):
            if j == s:
                continue
            c = (dlam[s] - dlam[j]) / (lam[s] - lam[j])
            out[s] -= (A[s] @ A[j] - A[j] @ A[s]) * c
    return out.reshape(k * n * n)


@jit
def _min_separation(lam):
    k = lam.shape[0]
    best = np.inf
    for i in range(k):
        for j in range(i + 1, k):
            dd = abs(lam[i] - lam[j])
            if dd < best:
                best = dd
    return best


@jit
def _rhs(kind, y, n, exps, coef, dexps, dcoef, poles, pres, pole_coord,
         pkind, p0, p1, pcoord, pr, th0, th1, s):
    t, v = path_point(pkind, p0, p1, pcoord, pr, th0, th1, s)
    if kind == RHS_LINEAR:
        A = connection_matrix(exps, coef, dexps, dcoef, poles, pres, pole_coord, t, v)
        X = y.reshape((n, n))
        return (A @ X).reshape(n * n)
    return _schlesinger_rhs(y, t, v, n)


@jit
def integrate_segment(kind, y0, n, exps, coef, dexps, dcoef, poles, pres, pole_coord,
                      pkind, p0, p1, pcoord, pr, th0, th1, tol, h0, hmin, max_steps,
                      collision):
    """Adaptive DP5(4) integration over s in [0, 1].

    Returns ``(y, error_sum, accepted, rejected, status)``.
    """
    y = y0.copy()
    s = 0.0
    h = h0
    err_sum = 0.0
    accepted = 0
    rejected = 0
    k1 = _rhs(kind, y, n, exps, coef, dexps, dcoef, poles, pres, pole_coord,
              pkind, p0, p1, pcoord, pr, th0, th1, s)
    while s < 1.0:
        if accepted + rejected >= max_steps:
            return y, err_sum, accepted, rejected, STATUS_MAXSTEPS
        if h < hmin:
            return y, err_sum, accepted, rejected, STATUS_UNDERFLOW
        last = False
        if s + h >= 1.0:
            h = 1.0 - s
            last = True
        k2 = _rhs(kind, y + h * (_A21 * k1), n, exps, coef, dexps, dcoef, poles, pres,
                  pole_coord, pkind, p0, p1, pcoord, pr, th0, th1, s + _C2 * h)
        k3 = _rhs(kind, y + h * (_A31 * k1 + _A32 * k2), n, exps, coef, dexps, dcoef, poles,
                  pres, pole_coord, pkind, p0, p1, pcoord, pr, th0, th1, s + _C3 * h)
        k4 = _rhs(kind, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), n, exps, coef, dexps,
                  dcoef, poles, pres, pole_coord, pkind, p0, p1, pcoord, pr, th0, th1,
                  s + _C4 * h)
        k5 = _rhs(kind, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), n, exps,
                  coef, dexps, dcoef, poles, pres, pole_coord, pkind, p0, p1, pcoord, pr,
                  th0, th1, s + _C5 * h)
        k6 = _rhs(kind, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
                  n, exps, coef, dexps, dcoef, poles, pres, pole_coord, pkind, p0, p1, pcoord,
                  pr, th0, th1, s + h)
        ynew = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _rhs(kind, ynew, n, exps, coef, dexps, dcoef, poles, pres, pole_coord,
                  pkind, p0, p1, pcoord, pr, th0, th1, s + h)
        errv = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = 0.0
        abserr = 0.0
        for i in range(y.shape[0]):
            scale = tol * (1.0 + max(abs(y[i]), abs(ynew[i])))
            e = abs(errv[i])
            if e / scale > err:
                err = e / scale
            if e > abserr:
                abserr = e
        if not np.isfinite(err):
            err = 1e10
        if err <= 1.0:
            s = 1.0 if last else s + h
            y = ynew
            k1 = k7
            err_sum += abserr
            accepted += 1
            if kind == RHS_SCHLESINGER:
                t, _v = path_point(pkind, p0, p1, pcoord, pr, th0, th1, s)
                if _min_separation(t) < collision:
                    return y, err_sum, accepted, rejected, STATUS_COLLISION
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = h * fac
        else:
            rejected += 1
            h = h * max(0.1, 0.9 * err ** -0.2)
    return y, err_sum, accepted, rejected, STATUS_OK
