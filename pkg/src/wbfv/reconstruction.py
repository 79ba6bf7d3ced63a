"""Well-balanced spatial reconstruction and stage fluctuation traces.

The time-n reconstruction of cell i recenters a MUSCL step around the local
stationary profile: limiting acts on the deviations ``v_j = avg_j -
profile_i(x_j)``, so stationary data reconstructs with zero slope and the
interface traces collapse onto the profile.  Stage states add a cheap
fluctuation reconstruction on top: piecewise constant (``pwcr``) or piecewise
linear with limiter weights frozen at time n (``pwlr``).

Cells whose profile could not be built fall back to the zero profile, which
reduces the scheme locally to a standard (non well-balanced) MUSCL update;
the flux/source correction terms are suppressed for those cells.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import PERIODIC, extend_with_ghosts, fluctuation_halo
from .stationary import COLLOCATED, EXACT, profile_field

MINMOD = "minmod"
AVG = "avg"
PWCR = "pwcr"
PWLR = "pwlr"

HALO_WIDTH = 2


def minmod(a, b):
    """min(a,b) for positive pairs, max(a,b) for negative ones, else 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.where(
        (a > 0) & (b > 0), np.minimum(a, b),
        np.where((a < 0) & (b < 0), np.maximum(a, b), 0.0),
    )


def avg(a, b):
    """Sign-weighted average (|a| b + |b| a) / (|a| + |b|), 0 at the origin."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = np.abs(a) + np.abs(b)
    safe = np.where(den > 0.0, den, 1.0)
    return np.where(den > 0.0, (np.abs(a) * b + np.abs(b) * a) / safe, 0.0)


def limit(kind, a, b):
    if kind == MINMOD:
        return minmod(a, b)
    if kind == AVG:
        return avg(a, b)
    raise ConfigurationError(f"unknown limiter {kind!r}")


def frozen_phis(kind, d_l, d_r):
    """Frozen slope-limiter weights from the raw average differences.

    The avg weights are |d_R|/(|d_L|+|d_R|) and |d_L|/(|d_L|+|d_R|); the
    minmod variant selects the smaller-magnitude side when the signs agree
    (splitting ties) and switches off otherwise.  Both give 0 when the data
    is locally flat.
    """
    d_l = np.asarray(d_l, dtype=float)
    d_r = np.asarray(d_r, dtype=float)
    if kind == AVG:
        den = np.abs(d_l) + np.abs(d_r)
        safe = np.where(den > 0.0, den, 1.0)
        phi_l = np.where(den > 0.0, np.abs(d_r) / safe, 0.0)
        phi_r = np.where(den > 0.0, np.abs(d_l) / safe, 0.0)
        return phi_l, phi_r
    if kind == MINMOD:
        same = d_l * d_r > 0.0
        al, ar = np.abs(d_l), np.abs(d_r)
        phi_l = np.where(same, np.where(al < ar, 1.0, np.where(al > ar, 0.0, 0.5)), 0.0)
        phi_r = np.where(same, np.where(ar < al, 1.0, np.where(ar > al, 0.0, 0.5)), 0.0)
        return phi_l, phi_r
    raise ConfigurationError(f"unknown limiter {kind!r}")


@dataclass
class WBReconstruction:
    """Per-step reconstruction data on the ghost-extended field.

    Arrays have shape ``(n + 2*width, n_comp)`` unless noted; the interior
    occupies ``[width, width + n)``.  ``trace_right[i]`` is the reconstructed
    state at ``x_{i+1/2}`` seen from cell i, ``trace_left[i]`` the state at
    ``x_{i-1/2}``; ``v0 = averages - profile_center`` vanishes bit-exactly
    wherever a profile exists (anchor identity).
    """

    model: object
    grid: object
    policy: object
    order: int
    limiter: str
    profile_source: str
    width: int
    averages_ext: np.ndarray
    ue_left: np.ndarray
    ue_right: np.ndarray
    ue_center: np.ndarray
    v0: np.ndarray
    slope: np.ndarray
    phi_l: np.ndarray
    phi_r: np.ndarray
    trace_left: np.ndarray
    trace_right: np.ndarray
    ok: np.ndarray
    xs_ext: np.ndarray
    hx_center: np.ndarray

    @property
    def n(self):
        return self.grid.n_cells

    @property
    def interior(self):
        return slice(self.width, self.width + self.n)

    def profile_failures(self):
        return int((~self.ok[self.interior]).sum())


def wb_reconstruct(model, averages, grid, order, limiter, policy,
                   profile_source, profile_fn=None, phi_limiter=AVG):
    """Build the well-balanced reconstruction for one time level.

    ``limiter`` acts on the profile deviations for the time-n slopes;
    ``phi_limiter`` picks the frozen-weight formula used by the piecewise
    linear fluctuation reconstruction (avg by default).
    """
    if order not in (1, 2):
        raise ConfigurationError(f"reconstruction order must be 1 or 2, got {order}")
    if profile_source not in (EXACT, COLLOCATED):
        raise ConfigurationError(f"unknown profile source {profile_source!r}")
    w = HALO_WIDTH
    ext = extend_with_ghosts(averages, policy, w, grid=grid, profile_fn=profile_fn)
    n_tot = ext.shape[0]
    xs_ext = grid.extended_centers(w)
    radius = 1 if order == 2 else 0
    centers, ue_left, ue_right, ok = profile_field(
        model, xs_ext, ext, grid.dx, radius, profile_source
    )
    ue_center = centers[:, radius, :]
    v0 = ext - ue_center

    slope = np.zeros_like(ext)
    phi_l = np.zeros_like(ext)
    phi_r = np.zeros_like(ext)
    if order == 2:
        # deviations from each cell's own profile over the 3-point stencil
        v_m = ext[:-2] - centers[1:-1, 0, :]
        v_p = ext[2:] - centers[1:-1, 2, :]
        v_c = v0[1:-1]
        dx = grid.dx
        sl = limit(limiter, (v_p - v_c) / dx, (v_c - v_m) / dx)
        # interior cells only; ghost reconstructions stay first-order except
        # under periodic wrap, where they mirror their interior twins so the
        # boundary fluxes telescope exactly
        n = grid.n_cells
        slope[w : w + n] = sl[w - 1 : w - 1 + n]
        d_l = ext[1:-1] - ext[:-2]
        d_r = ext[2:] - ext[1:-1]
        pl, pr = frozen_phis(phi_limiter, d_l, d_r)
        phi_l[w : w + n] = pl[w - 1 : w - 1 + n]
        phi_r[w : w + n] = pr[w - 1 : w - 1 + n]
        if policy.left == PERIODIC:
            for arr in (slope, phi_l, phi_r):
                arr[:w] = arr[n : n + w]
                arr[w + n :] = arr[w : 2 * w]

    half = 0.5 * grid.dx
    trace_right = ue_right + v0 + half * slope
    trace_left = ue_left + v0 - half * slope
    return WBReconstruction(
        model=model, grid=grid, policy=policy, order=order, limiter=limiter,
        profile_source=profile_source, width=w, averages_ext=ext,
        ue_left=ue_left, ue_right=ue_right, ue_center=ue_center, v0=v0,
        slope=slope, phi_l=phi_l, phi_r=phi_r,
        trace_left=trace_left, trace_right=trace_right, ok=ok,
        xs_ext=xs_ext, hx_center=np.asarray(model.Hx(xs_ext), dtype=float),
    )


def qtilde_traces(kind, wb, uf_ext):
    """Fluctuation-reconstruction traces for all extended cells.

    Returns (left, right, center) values of the stage reconstruction
    increment at ``x_{i-1/2}``, ``x_{i+1/2}`` and ``x_i``.
    """
    if kind == PWCR:
        return uf_ext, uf_ext, uf_ext
    if kind != PWLR:
        raise ConfigurationError(f"unknown fluctuation kind {kind!r}")
    tl = uf_ext.copy()
    tr = uf_ext.copy()
    dif_l = uf_ext[1:-1] - uf_ext[:-2]
    dif_r = uf_ext[2:] - uf_ext[1:-1]
    bump = 0.5 * (wb.phi_l[1:-1] * dif_l + wb.phi_r[1:-1] * dif_r)
    tl[1:-1] -= bump
    tr[1:-1] += bump
    return tl, tr, uf_ext


def fluctuation_traces(kind, wb, uf, i):
    """Q-tilde values of interior cell i: (x_{i-1/2}, x_{i+1/2}, x_i)."""
    uf_ext = fluctuation_halo(uf, wb.policy, wb.width)
    tl, tr, tc = qtilde_traces(kind, wb, uf_ext)
    j = wb.width + i
    return tl[j], tr[j], tc[j]


def stage_interface_states(wb, traces, i):
    """Stage traces of interior cell i: time-n traces plus fluctuation traces.

    ``traces`` is the (left, right, center) triple from
    :func:`fluctuation_traces`; returns the stage values
    (u^+ at x_{i-1/2}, u^- at x_{i+1/2}, P(x_i)).
    """
    tl, tr, tc = traces
    j = wb.width + i
    return (wb.trace_left[j] + tl,
            wb.trace_right[j] + tr,
            wb.averages_ext[j] + tc)
