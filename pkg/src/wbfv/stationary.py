"""Local stationary profiles through a given cell value.

Transport and Burgers have closed-form steady solutions (exponentials), so
their profiles are exact.  Shallow water profiles are marched from the anchor
with one-stage implicit-midpoint collocation: half steps to the cell
interfaces, reusing the interface value as a waypoint on the way to the
neighbor centers, so interface and center values come from one consistent
trajectory.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CollocationError, ConfigurationError, CriticalFlowError

STAT_TOL = 1e-14
STAT_MAXITER = 100

EXACT = "exact"
COLLOCATED = "collocated"


@dataclass
class StationaryProfile:
    """Steady solution through one cell's value, sampled on its stencil.

    ``centers[radius + j]`` holds the value at the center of cell
    ``anchor + j``; the anchor column equals the anchor value exactly.
    """

    anchor: int
    radius: int
    centers: np.ndarray
    iface_left: np.ndarray
    iface_right: np.ndarray
    provenance: str
    ok: bool = True

    def center_value(self, offset=0):
        return self.centers[self.radius + offset]


def _leg_deltas(dx, radius):
    """Per-side leg lengths: half steps to the interface and first neighbor,
    then full steps outward."""
    legs = [0.5 * dx, 0.5 * dx] if radius >= 1 else [0.5 * dx]
    legs += [dx] * max(radius - 1, 0)
    return np.asarray(legs)


def exact_profile(model, grid, i, value, stencil_radius=1):
    """Closed-form profile ``value * exp(kappa (x - x_i))`` for scalar models."""
    if not getattr(model, "has_exact_profile", False):
        raise ConfigurationError(
            f"{type(model).__name__} has no closed-form stationary solutions"
        )
    value = np.atleast_1d(np.asarray(value, dtype=float))
    kappa = model.profile_exponent()
    dx = grid.dx
    offs = np.arange(-stencil_radius, stencil_radius + 1) * dx
    centers = value[None, :] * np.exp(kappa * offs)[:, None]
    left = value * np.exp(-0.5 * kappa * dx)
    right = value * np.exp(0.5 * kappa * dx)
    return StationaryProfile(i, stencil_radius, centers, left, right, EXACT)


def collocation_step(model, x, u, delta, tol=STAT_TOL, maxiter=STAT_MAXITER):
    """One implicit-midpoint step of the stationary ODE from (x, u)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    vals, ok = _kernels.march_legs(
        model, np.array([float(x)]), u[None, :], np.array([float(delta)]), tol, maxiter
    )
    if not ok[0]:
        # classify: a critical/invalid state raises through the model itself
        model.stationary_slope(u, x + 0.5 * delta)
        raise CollocationError(
            f"midpoint iteration did not converge within {maxiter} iterations"
        )
    return vals[0, 0]


def collocated_profile(model, grid, i, value, stencil_radius=1,
                       tol=STAT_TOL, maxiter=STAT_MAXITER):
    """Profile marched from the anchor value; marked not-ok on any failure."""
    value = np.atleast_1d(np.asarray(value, dtype=float))
    n_comp = value.shape[0]
    x_i = grid.cell_center(i)
    legs = _leg_deltas(grid.dx, stencil_radius)
    right, ok_r = _kernels.march_legs(
        model, np.array([x_i]), value[None, :], legs, tol, maxiter
    )
    left, ok_l = _kernels.march_legs(
        model, np.array([x_i]), value[None, :], -legs, tol, maxiter
    )
    ok = bool(ok_r[0] and ok_l[0])
    r = stencil_radius
    centers = np.zeros((2 * r + 1, n_comp))
    centers[r] = value
    if ok and r >= 1:
        for j in range(1, r + 1):
            centers[r + j] = right[0, j]
            centers[r - j] = left[0, j]
    iface_left = left[0, 0] if ok else np.zeros(n_comp)
    iface_right = right[0, 0] if ok else np.zeros(n_comp)
    if not ok:
        centers[:] = 0.0
    return StationaryProfile(i, r, centers, iface_left, iface_right, COLLOCATED, ok)


def profile_field(model, xs, values, dx, radius, source,
                  tol=STAT_TOL, maxiter=STAT_MAXITER):
    """Profiles for every cell at once (struct-of-arrays form).

    Returns (centers, iface_left, iface_right, ok) with shapes
    ``(n, 2*radius+1, n_comp)``, ``(n, n_comp)`` twice and ``(n,)``.  Failed
    cells are zeroed; the reconstruction treats them as the zero profile.
    """
    values = np.asarray(values, dtype=float)
    n, n_comp = values.shape
    centers = np.zeros((n, 2 * radius + 1, n_comp))
    centers[:, radius, :] = values
    if source == EXACT:
        if not getattr(model, "has_exact_profile", False):
            raise ConfigurationError(
                f"{type(model).__name__} has no closed-form stationary solutions"
            )
        kappa = model.profile_exponent()
        offs = np.arange(-radius, radius + 1) * dx
        centers = values[:, None, :] * np.exp(kappa * offs)[None, :, None]
        iface_left = values * np.exp(-0.5 * kappa * dx)
        iface_right = values * np.exp(0.5 * kappa * dx)
        return centers, iface_left, iface_right, np.ones(n, dtype=bool)
    legs = _leg_deltas(dx, radius)
    right, ok_r = _kernels.march_legs(model, xs, values, legs, tol, maxiter)
    left, ok_l = _kernels.march_legs(model, xs, values, -legs, tol, maxiter)
    ok = ok_r & ok_l
    iface_left = left[:, 0, :].copy()
    iface_right = right[:, 0, :].copy()
    for j in range(1, radius + 1):
        centers[:, radius + j, :] = right[:, j, :]
        centers[:, radius - j, :] = left[:, j, :]
    bad = ~ok
    if bad.any():
        centers[bad] = 0.0
        iface_left[bad] = 0.0
        iface_right[bad] = 0.0
    return centers, iface_left, iface_right, ok


def extension_fn(model, source, tol=STAT_TOL, maxiter=STAT_MAXITER):
    """Profile evaluator for the stationary-extension boundary policy.

    Returns ``f(x_anchor, state, offsets) -> (len(offsets), n_comp)`` values
    of the steady solution through ``state``; offsets must be monotone with
    matching sign (ghost centers are).
    """
    def evaluate(x_anchor, state, offsets):
        state = np.atleast_1d(np.asarray(state, dtype=float))
        offsets = np.asarray(offsets, dtype=float)
        if source == EXACT:
            kappa = model.profile_exponent()
            return state[None, :] * np.exp(kappa * offsets)[:, None]
        # march in half steps through the interface waypoints so ghost values
        # lie on the same discrete trajectory as the interior profiles
        positions = np.empty(2 * offsets.size)
        positions[0::2] = offsets - 0.5 * (offsets[0] if offsets.size else 0.0)
        positions[1::2] = offsets
        deltas = np.diff(np.concatenate([[0.0], positions]))
        vals, ok = _kernels.march_legs(
            model, np.array([x_anchor]), state[None, :], deltas, tol, maxiter
        )
        if not ok[0]:
            raise CollocationError("stationary extension march failed at the boundary")
        return vals[0][1::2]

    return evaluate


def march_trajectory(model, x0, state, stops, tol=STAT_TOL, maxiter=STAT_MAXITER):
    """Steady trajectory through (x0, state) evaluated at the given stops."""
    state = np.atleast_1d(np.asarray(state, dtype=float))
    stops = np.asarray(stops, dtype=float)
    deltas = np.diff(np.concatenate([[x0], stops]))
    vals, ok = _kernels.march_legs(
        model, np.array([float(x0)]), state[None, :], deltas, tol, maxiter
    )
    if not ok[0]:
        raise CollocationError("stationary trajectory march failed")
    return vals[0]


def steady_state_cells(model, grid, x_anchor, state, tol=STAT_TOL, maxiter=STAT_MAXITER):
    """Cell-center samples of the steady solution anchored at a domain edge.

    The march alternates interface and center waypoints so the trajectory is
    the same one the per-cell reconstruction profiles retrace.
    """
    n, dx = grid.n_cells, grid.dx
    if abs(x_anchor - grid.x_left) < abs(x_anchor - grid.x_right):
        stops = grid.x_left + 0.5 * dx * np.arange(1, 2 * n)
        vals = march_trajectory(model, grid.x_left, state, stops, tol, maxiter)
        return vals[0::2].copy()
    stops = grid.x_right - 0.5 * dx * np.arange(1, 2 * n)
    vals = march_trajectory(model, grid.x_right, state, stops, tol, maxiter)
    return vals[0::2][::-1].copy()
