"""Hot numeric kernels: implicit-midpoint marching and banded LU.

Each kernel exists twice: a numba ``@njit`` per-cell version (``*_nb``) and a
pure-numpy fallback (``*_np``).  ``march_legs`` / ``banded_lu_solve`` pick the
flavor according to :mod:`wbfv._backend`; both flavors remain importable for
cross-checks and the backend benchmark.

The midpoint step advances the stationary ODE through ``u_next`` solving
``u_next = u + delta * slope((u + u_next)/2, x + delta/2)`` by fixed-point
iteration on the midpoint value ``v``; ``u_next = 2 v - u`` keeps the step
time-reversible to round-off.
"""

import numpy as np

from ._backend import NUMBA_ENABLED, njit
from .models import (
    DEPTH_COS_BUMP,
    DEPTH_EXP_COS,
    DEPTH_FLAT,
    DEPTH_GAUSSIAN,
    MODEL_BURGERS,
    MODEL_SWE,
    MODEL_TRANSPORT,
    CRIT_REL_TOL,
)

# ---------------------------------------------------------------------------
# numba flavor


@njit(cache=True)
def _depth_dh_nb(kind, p, x):
    if kind == DEPTH_FLAT:
        return 0.0
    if kind == DEPTH_COS_BUMP:
        d, c, w = p[0], p[1], p[2]
        if abs(x - c) <= 0.5 * w:
            return (d * np.pi / w) * np.sin(2.0 * np.pi * (x - c) / w)
        return 0.0
    if kind == DEPTH_GAUSSIAN:
        base, amp, decay, center = p[0], p[1], p[2], p[3]
        dxc = x - center
        return 2.0 * decay * dxc * amp * np.exp(-decay * dxc * dxc)
    if kind == DEPTH_EXP_COS:
        omega = p[0]
        scale = 2.0 * (np.e - 1.0 / np.e)
        return omega * np.sin(omega * x) * np.exp(np.cos(omega * x)) / scale
    return 0.0


@njit(cache=True)
def _slope_nb(model_id, mp, depth_id, dp, u0, u1, x):
    """Stationary slope at one state; returns (s0, s1, ok)."""
    if model_id == MODEL_TRANSPORT:
        return (mp[1] / mp[0]) * u0, 0.0, True
    if model_id == MODEL_BURGERS:
        return mp[0] * u0, 0.0, True
    h, q = u0, u1
    if h <= 0.0:
        return 0.0, 0.0, False
    g, k, mu = mp[0], mp[1], mp[2]
    gh = g * h
    vel2 = (q / h) ** 2
    den = gh - vel2
    if abs(den) <= CRIT_REL_TOL * max(gh, vel2):
        return 0.0, 0.0, False
    hx = _depth_dh_nb(depth_id, dp, x)
    num = gh * hx - k * q * abs(q) / h**mu
    return num / den, 0.0, True


@njit(cache=True)
def _midpoint_step_nb(model_id, mp, depth_id, dp, x, u0, u1, delta, tol, maxiter):
    if delta == 0.0:
        return u0, u1, True
    xm = x + 0.5 * delta
    v0, v1 = u0, u1
    for _ in range(maxiter):
        s0, s1, ok = _slope_nb(model_id, mp, depth_id, dp, v0, v1, xm)
        if not ok:
            return 0.0, 0.0, False
        n0 = u0 + 0.5 * delta * s0
        n1 = u1 + 0.5 * delta * s1
        d = max(abs(n0 - v0), abs(n1 - v1))
        v0, v1 = n0, n1
        if d <= tol:
            return 2.0 * v0 - u0, 2.0 * v1 - u1, True
    return 2.0 * v0 - u0, 2.0 * v1 - u1, False


@njit(cache=True)
def march_legs_nb(model_id, mp, depth_id, dp, xs, us, deltas, tol, maxiter):
    """March every cell through the delta sequence, recording each leg."""
    n, ncomp = us.shape
    m = deltas.shape[0]
    out = np.zeros((n, m, ncomp))
    ok = np.ones(n, dtype=np.bool_)
    for i in range(n):
        x = xs[i]
        c0 = us[i, 0]
        c1 = us[i, 1] if ncomp == 2 else 0.0
        for leg in range(m):
            c0, c1, good = _midpoint_step_nb(
                model_id, mp, depth_id, dp, x, c0, c1, deltas[leg], tol, maxiter
            )
            if not good:
                ok[i] = False
                out[i, :, :] = 0.0
                break
            x += deltas[leg]
            out[i, leg, 0] = c0
            if ncomp == 2:
                out[i, leg, 1] = c1
    return out, ok


# ---------------------------------------------------------------------------
# numpy flavor (vectorized across cells)


def _guarded_slope_np(model_id, mp, depth_id, dp, v, x):
    """Vectorized stationary slope with per-cell validity flags."""
    ok = np.ones(v.shape[0], dtype=bool)
    out = np.zeros_like(v)
    if model_id == MODEL_TRANSPORT:
        out[:, 0] = (mp[1] / mp[0]) * v[:, 0]
        return out, ok
    if model_id == MODEL_BURGERS:
        out[:, 0] = mp[0] * v[:, 0]
        return out, ok
    g, k, mu = mp[0], mp[1], mp[2]
    h, q = v[:, 0], v[:, 1]
    ok &= h > 0.0
    hs = np.where(ok, h, 1.0)
    gh = g * hs
    vel2 = (q / hs) ** 2
    den = gh - vel2
    ok &= np.abs(den) > CRIT_REL_TOL * np.maximum(gh, vel2)
    den = np.where(ok, den, 1.0)
    hx = _depth_dh_np(depth_id, dp, x)
    num = gh * hx - k * q * np.abs(q) / hs**mu
    out[:, 0] = np.where(ok, num / den, 0.0)
    return out, ok


def _depth_dh_np(kind, p, x):
    x = np.asarray(x, dtype=float)
    if kind == DEPTH_FLAT:
        return np.zeros_like(x)
    if kind == DEPTH_COS_BUMP:
        d, c, w = p[0], p[1], p[2]
        inside = np.abs(x - c) <= 0.5 * w
        return np.where(inside, (d * np.pi / w) * np.sin(2.0 * np.pi * (x - c) / w), 0.0)
    if kind == DEPTH_GAUSSIAN:
        base, amp, decay, center = p[0], p[1], p[2], p[3]
        dxc = x - center
        return 2.0 * decay * dxc * amp * np.exp(-decay * dxc * dxc)
    omega = p[0]
    scale = 2.0 * (np.e - 1.0 / np.e)
    return omega * np.sin(omega * x) * np.exp(np.cos(omega * x)) / scale


def _midpoint_step_np(model_id, mp, depth_id, dp, x, u, delta, tol, maxiter):
    """One implicit-midpoint leg for all cells at once."""
    if delta == 0.0:
        return u.copy(), np.ones(u.shape[0], dtype=bool)
    xm = x + 0.5 * delta
    v = u.copy()
    ok = np.ones(u.shape[0], dtype=bool)
    upd = np.zeros(u.shape[0])
    for _ in range(maxiter):
        s, sok = _guarded_slope_np(model_id, mp, depth_id, dp, v, xm)
        ok &= sok
        vn = u + 0.5 * delta * s
        upd = np.abs(vn - v).max(axis=1)
        v = np.where(ok[:, None], vn, v)
        active = upd[ok]
        if active.size == 0 or active.max() <= tol:
            return 2.0 * v - u, ok
    ok &= upd <= tol
    return 2.0 * v - u, ok


def march_legs_np(model_id, mp, depth_id, dp, xs, us, deltas, tol, maxiter):
    """Numpy twin of :func:`march_legs_nb` (same call and return shape)."""
    n, ncomp = us.shape
    m = deltas.shape[0]
    out = np.zeros((n, m, ncomp))
    ok = np.ones(n, dtype=bool)
    cur = us.astype(float).copy()
    x = xs.astype(float).copy()
    for leg in range(m):
        cur, legok = _midpoint_step_np(model_id, mp, depth_id, dp, x, cur, deltas[leg], tol, maxiter)
        ok &= legok
        x = x + deltas[leg]
        out[:, leg, :] = cur
    out[~ok] = 0.0
    return out, ok


def march_legs(model, xs, us, deltas, tol, maxiter):
    """Backend dispatcher; takes the model object and plain arrays."""
    model_id, mp, depth_id, dp = model.numba_spec()
    xs = np.ascontiguousarray(xs, dtype=float)
    us = np.ascontiguousarray(us, dtype=float)
    deltas = np.ascontiguousarray(deltas, dtype=float)
    if NUMBA_ENABLED:
        return march_legs_nb(model_id, mp, depth_id, dp, xs, us, deltas, tol, maxiter)
    return march_legs_np(model_id, mp, depth_id, dp, xs, us, deltas, tol, maxiter)


# ---------------------------------------------------------------------------
# banded LU (no pivoting)
#
# Band storage: bands[k, j] holds matrix entry A[j + k - bw, j], i.e. row k of
# the band array is the (k - bw)-th diagonal; k = bw is the main diagonal.


@njit(cache=True)
def _banded_factor_nb(bands, bw):
    n = bands.shape[1]
    for k in range(n):
        piv = bands[bw, k]
        if piv == 0.0:
            return 1
        imax = min(k + bw, n - 1)
        jmax = min(k + bw, n - 1)
        for i in range(k + 1, imax + 1):
            m = bands[bw + i - k, k] / piv
            bands[bw + i - k, k] = m  # store the multiplier in the eliminated slot
            if m != 0.0:
                for j in range(k + 1, jmax + 1):
                    bands[bw + i - j, j] -= m * bands[bw + k - j, j]
    return 0


def _banded_factor_np(bands, bw):
    n = bands.shape[1]
    for k in range(n):
        piv = bands[bw, k]
        if piv == 0.0:
            return 1
        imax = min(k + bw, n - 1)
        jmax = min(k + bw, n - 1)
        for i in range(k + 1, imax + 1):
            m = bands[bw + i - k, k] / piv
            bands[bw + i - k, k] = m
            if m != 0.0:
                for j in range(k + 1, jmax + 1):
                    bands[bw + i - j, j] -= m * bands[bw + k - j, j]
    return 0


@njit(cache=True)
def _banded_substitute_nb(lu, rhs, bw):
    n = rhs.shape[0]
    for k in range(n):
        imax = min(k + bw, n - 1)
        for i in range(k + 1, imax + 1):
            rhs[i] -= lu[bw + i - k, k] * rhs[k]
    for i in range(n - 1, -1, -1):
        s = rhs[i]
        jmax = min(i + bw, n - 1)
        for j in range(i + 1, jmax + 1):
            s -= lu[bw + i - j, j] * rhs[j]
        rhs[i] = s / lu[bw, i]


def _banded_substitute_np(lu, rhs, bw):
    n = rhs.shape[0]
    for k in range(n):
        imax = min(k + bw, n - 1)
        for i in range(k + 1, imax + 1):
            rhs[i] -= lu[bw + i - k, k] * rhs[k]
    for i in range(n - 1, -1, -1):
        s = rhs[i]
        jmax = min(i + bw, n - 1)
        for j in range(i + 1, jmax + 1):
            s -= lu[bw + i - j, j] * rhs[j]
        rhs[i] = s / lu[bw, i]


def banded_factor(bands, bw):
    """LU-factor the band in place on a copy; returns (lu, status)."""
    work = np.array(bands, dtype=float, copy=True)
    if NUMBA_ENABLED:
        status = _banded_factor_nb(work, bw)
    else:
        status = _banded_factor_np(work, bw)
    return work, status


def banded_substitute(lu, rhs, bw):
    """Forward/back substitution with a factored band; returns the solution."""
    x = np.array(rhs, dtype=float, copy=True)
    if NUMBA_ENABLED:
        _banded_substitute_nb(lu, x, bw)
    else:
        _banded_substitute_np(lu, x, bw)
    return x


def banded_lu_solve(bands, rhs, bw):
    """One-shot banded solve; returns (x, status)."""
    lu, status = banded_factor(bands, bw)
    if status != 0:
        return np.array(rhs, dtype=float, copy=True), status
    return banded_substitute(lu, rhs, bw), 0
