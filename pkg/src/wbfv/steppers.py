"""Time integration of the fluctuation system.

Each step freezes the well-balanced reconstruction at time n and evolves the
per-cell fluctuation ``uf`` with ``du^f/dt = L(uf)``, where L combines the
interface fluxes of the stage states with the profile flux/source correction
terms.  Stationary data gives L(0) = 0 cell by cell, so every scheme below
(backward Euler, SDIRK2, IMEX pairs, and the explicit references) preserves
steady states to round-off.

Implicit stages solve ``uf = base + coeff L(uf)``.  The default fixed-point
map is a chord-Newton sweep, ``x <- x - J0^{-1} R(x)``, with the banded
residual Jacobian frozen at the stage guess and factored once; it stays
contractive at large CFL where the undamped iteration diverges.  Newton mode
instead re-linearizes every correction.  For the linear transport model a
single banded correction is exact and serves as the direct fast path.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import banded_factor, banded_lu_solve, banded_substitute
from .errors import ConfigurationError, SingularMatrixError, StageSolveError, StateError
from .grid import PERIODIC, fluctuation_halo
from .models import EXPLICIT, IMPLICIT
from .numflux import default_viscosity, rusanov, split_rusanov
from .reconstruction import MINMOD, PWCR, PWLR, qtilde_traces, wb_reconstruct

GAMMA_SDIRK2 = 1.0 - 1.0 / math.sqrt(2.0)  # equals (2 - sqrt(2))/2

FULL = "full"


@dataclass(frozen=True)
class ButcherPair:
    """Implicit tableau (stiffly accurate, constant diagonal) plus an optional
    paired explicit tableau for IMEX stepping."""

    a: tuple
    b: tuple
    c: tuple
    a_ex: tuple = None
    b_ex: tuple = None
    c_ex: tuple = None

    def __post_init__(self):
        s = len(self.b)
        a = np.asarray(self.a, dtype=float)
        if a.shape != (s, s):
            raise ConfigurationError("implicit tableau shape mismatch")
        if not np.allclose(a[-1], np.asarray(self.b, dtype=float), atol=1e-15):
            raise ConfigurationError("implicit tableau must be stiffly accurate")
        diag = np.diag(a)
        if not np.allclose(diag, diag[0], atol=1e-15) or diag[0] <= 0.0:
            raise ConfigurationError("tableau must be singly diagonally implicit")
        if self.a_ex is not None:
            ae = np.asarray(self.a_ex, dtype=float)
            if ae.shape != (s, s) or np.any(np.triu(ae) != 0.0):
                raise ConfigurationError("explicit tableau must be strictly lower triangular")

    @property
    def stages(self):
        return len(self.b)

    @property
    def gamma(self):
        return self.a[0][0]

    @classmethod
    def backward_euler(cls):
        return cls(((1.0,),), (1.0,), (1.0,))

    @classmethod
    def sdirk2(cls):
        g = GAMMA_SDIRK2
        return cls(((g, 0.0), (1.0 - g, g)), (1.0 - g, g), (g, 1.0))

    @classmethod
    def imex1(cls):
        """Forward/backward Euler pairing for the first-order semi-implicit scheme."""
        return cls(((1.0,),), (1.0,), (1.0,),
                   a_ex=((0.0,),), b_ex=(1.0,), c_ex=(0.0,))

    @classmethod
    def imex2(cls):
        g = GAMMA_SDIRK2
        return cls(((g, 0.0), (1.0 - g, g)), (1.0 - g, g), (g, 1.0),
                   a_ex=((0.0, 0.0), (1.0 / (2.0 * g), 0.0)),
                   b_ex=(1.0 - g, g), c_ex=(0.0, 1.0 / (2.0 * g)))


@dataclass(frozen=True)
class SolverConfig:
    """Stage solver settings.

    ``newton_iters = 0`` selects the damped fixed-point iteration;
    ``newton_iters > 0`` is the Newton iteration budget (with residual-first
    early exit, so stationary stages cost zero corrections).
    ``linear_fast_path`` switches linear models to one exact banded solve.
    """

    stage_tol: float = 1e-12
    stage_maxiter: int = 1000
    newton_iters: int = 0
    linear_fast_path: bool = True

    def __post_init__(self):
        if not self.stage_tol > 0.0:
            raise ConfigurationError("stage_tol must be positive")
        if self.stage_maxiter < 1:
            raise ConfigurationError("stage_maxiter must be >= 1")


@dataclass
class StepStats:
    """Per-step record: time step, stage iteration counts and residuals, the
    accepted final-stage fluctuation and profile fallback diagnostics."""

    dt: float
    stage_iters: tuple
    stage_residuals: tuple
    fluctuation: np.ndarray = None
    profile_failures: int = 0

    @property
    def fixed_point_total(self):
        return int(sum(self.stage_iters))

    @property
    def fallback(self):
        return self.profile_failures > 0


def compute_dt(cfl, grid, averages, model, t_remaining=None):
    """cfl * dx over the maximal wave speed of the current averages."""
    if not cfl > 0.0:
        raise ConfigurationError("CFL number must be positive")
    speeds = model.max_wave_speed(np.asarray(averages, dtype=float))
    smax = float(np.max(speeds))
    if not np.isfinite(smax) or smax <= 0.0:
        raise StateError("zero maximal wave speed; no wave scale for the time step")
    dt = cfl * grid.dx / smax
    if t_remaining is not None:
        dt = min(dt, t_remaining)
    return dt


# ---------------------------------------------------------------------------
# spatial operator


def spatial_operator(model, wb, uf, kind, part=FULL, split_spec=None, visc_rule=None):
    """Per-cell right-hand side L_i at the stage state ``averages + uf``.

    Combines the interface flux differences of the stage traces with the
    profile flux corrections and the recentered source terms.  ``part``
    selects the full operator or one side of an IMEX splitting.  Cells
    flagged by the reconstruction fall back to the plain (uncorrected)
    scheme.
    """
    uf = np.asarray(uf, dtype=float)
    w, n, dx = wb.width, wb.n, wb.grid.dx
    uf_ext = fluctuation_halo(uf, wb.policy, w)
    tl, tr, tc = qtilde_traces(kind, wb, uf_ext)
    um = wb.trace_right + tr
    up = wb.trace_left + tl
    u_left = um[w - 1 : w + n]
    u_right = up[w : w + n + 1]
    if part == FULL:
        flux_ifc = rusanov(model, u_left, u_right, visc_rule or default_viscosity(model))
        f_of = model.flux
        sg_of = model.source_geom
        sp_of = model.source_plain
    else:
        flux_ifc = split_rusanov(model, part, split_spec, u_left, u_right)
        f_of = lambda u: split_spec.flux_part(part, u)
        sg_of = lambda u: split_spec.source_geom_part(part, u)
        sp_of = lambda u: split_spec.source_plain_part(part, u)

    out = -(flux_ifc[1:] - flux_ifc[:-1]) / dx
    sl = wb.interior
    ok = wb.ok[sl]
    p_center = wb.averages_ext[sl] + tc[sl]
    hx = wb.hx_center[sl]
    if ok.all():
        out += (f_of(wb.ue_right[sl]) - f_of(wb.ue_left[sl])) / dx
        out += (sg_of(p_center) - sg_of(wb.ue_center[sl])) * hx[:, None]
        out += sp_of(p_center) - sp_of(wb.ue_center[sl])
        return out
    good = np.where(ok)[0]
    bad = np.where(~ok)[0]
    if good.size:
        ue_l = wb.ue_left[sl][good]
        ue_r = wb.ue_right[sl][good]
        ue_c = wb.ue_center[sl][good]
        out[good] += (f_of(ue_r) - f_of(ue_l)) / dx
        out[good] += (sg_of(p_center[good]) - sg_of(ue_c)) * hx[good, None]
        out[good] += sp_of(p_center[good]) - sp_of(ue_c)
    if bad.size:
        out[bad] += sg_of(p_center[bad]) * hx[bad, None] + sp_of(p_center[bad])
    return out


# ---------------------------------------------------------------------------
# linear algebra helpers


def solve_banded(bandwidth, diagonals, rhs):
    """Direct banded LU solve without pivoting.

    ``diagonals`` has shape ``(2*bandwidth + 1, n)``; row k holds the
    (k - bandwidth)-th diagonal stored by column, i.e. ``diagonals[k, j]`` is
    the matrix entry ``A[j + k - bandwidth, j]``.  Out-of-range positions are
    ignored.
    """
    bw = int(bandwidth)
    if bw < 1:
        raise ConfigurationError("bandwidth must be >= 1")
    diagonals = np.asarray(diagonals, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if diagonals.ndim != 2 or diagonals.shape[0] != 2 * bw + 1:
        raise ConfigurationError("diagonals must have shape (2*bandwidth+1, n)")
    if diagonals.shape[1] != rhs.shape[0]:
        raise ConfigurationError("diagonals and rhs sizes do not match")
    x, status = banded_lu_solve(diagonals, rhs, bw)
    if status != 0:
        raise SingularMatrixError("zero pivot in banded LU")
    return x


def banded_fd_jacobian(residual, x, half_bandwidth, r0=None, linear=False,
                       periodic=False):
    """Banded Jacobian of a flat residual map by colored finite differences.

    Columns a full bandwidth apart are perturbed together, so the Jacobian
    costs ``2*half_bandwidth + 1`` residual evaluations.  ``linear=True``
    uses unit perturbations (exact for affine residuals).  ``periodic=True``
    splits every color at the array midpoint so wrap-around couplings cannot
    alias into the band; the corner entries themselves are left out of the
    chord Jacobian (the fixed point is unaffected, only its rate).
    """
    x = np.asarray(x, dtype=float)
    m = x.size
    beta = int(half_bandwidth)
    if r0 is None:
        r0 = residual(x)
    bands = np.zeros((2 * beta + 1, m))
    stride = 2 * beta + 1

    def fill(cols):
        if cols.size == 0:
            return
        eps = np.ones(cols.size) if linear else 1e-7 * (1.0 + np.abs(x[cols]))
        pert = np.zeros(m)
        pert[cols] = eps
        dr = residual(x + pert) - r0
        for off in range(-beta, beta + 1):
            rows = cols + off
            valid = (rows >= 0) & (rows < m)
            bands[beta + off, cols[valid]] = dr[rows[valid]] / eps[valid]

    half = m // 2
    for color in range(min(stride, m)):
        cols = np.arange(color, m, stride)
        if periodic and half > beta:
            fill(cols[cols < half])
            fill(cols[cols >= half])
        elif periodic:
            for j in cols:
                fill(np.array([j]))
        else:
            fill(cols)
    return bands


# ---------------------------------------------------------------------------
# stage solvers


def solve_stage(G, guess, cfg, residual=None, bandwidth=None):
    """Solve one implicit stage system.

    Default mode iterates ``x <- G(x)`` until the update drops below
    ``stage_tol``.  With ``newton_iters > 0`` it instead applies up to that
    many banded Newton corrections to ``residual`` (checked against the
    tolerance before each correction); the budget is allowed to run out, so
    a single-correction configuration is expressible.

    An iterate that leaves the model's state space (StateError from G) is
    backtracked halfway toward the last valid iterate instead of aborting.

    Returns ``(x, iterations, final_residual)``.
    """
    x = np.array(guess, dtype=float, copy=True)
    if cfg.newton_iters > 0:
        if residual is None or bandwidth is None:
            raise ConfigurationError("Newton mode needs a residual map and bandwidth")
        shape = x.shape
        flat = lambda z: residual(z.reshape(shape)).ravel()
        xf = x.ravel()
        iters = 0
        r = flat(xf)
        res = float(np.max(np.abs(r)))
        for _ in range(cfg.newton_iters):
            if res <= cfg.stage_tol:
                break
            bands = banded_fd_jacobian(flat, xf, bandwidth, r0=r)
            xf = xf - solve_banded(bandwidth, bands, r)
            r = flat(xf)
            res = float(np.max(np.abs(r)))
            iters += 1
        if not np.isfinite(res):
            raise StageSolveError("Newton correction diverged", residual=res, iterations=iters)
        return xf.reshape(shape), iters, res
    upd = np.inf
    x_prev = x
    backtracks = 0
    m = 0
    while m < cfg.stage_maxiter:
        m += 1
        try:
            xn = G(x)
        except StateError:
            backtracks += 1
            if backtracks > 60:
                raise StageSolveError(
                    "stage iterate left the admissible state space",
                    residual=upd, iterations=m,
                )
            x = 0.5 * (x + x_prev)
            continue
        upd = float(np.max(np.abs(xn - x)))
        x_prev = x
        x = xn
        if upd <= cfg.stage_tol:
            return x, m, upd
    raise StageSolveError(
        f"stage fixed point did not converge in {cfg.stage_maxiter} iterations",
        residual=upd, iterations=cfg.stage_maxiter,
    )


def _implicit_stage(model, wb, kind, part, split_spec, coeff, base, guess, cfg,
                    jac_cache=None):
    """Solve ``x = base + coeff * L(x)`` for one RK stage."""
    n_comp = model.n_comp
    radius = 2 if kind == PWLR else 1
    beta = radius * n_comp + (n_comp - 1)

    def L_of(x):
        return spatial_operator(model, wb, x, kind, part, split_spec)

    def residual(x):
        return x - base - coeff * L_of(x)

    linear = bool(getattr(model, "is_linear", False)) and part == FULL
    if cfg.newton_iters > 0:
        return solve_stage(None, guess, cfg, residual=residual, bandwidth=beta)

    # damped fixed point: chord-Newton map with the banded stage Jacobian
    # frozen at the initial guess and factored once.  For linear models with
    # the fast path on, unit-step differencing makes the band exact and one
    # sweep equals the direct banded solve; the factored band is then also
    # reused across stages of the same step.
    shape = guess.shape
    flat = lambda z: residual(z.reshape(shape)).ravel()
    xf0 = np.array(guess, dtype=float).ravel()
    r0 = flat(xf0)
    res0 = float(np.max(np.abs(r0)))
    if res0 <= cfg.stage_tol:
        return xf0.reshape(shape), 1, res0
    exact_band = linear and cfg.linear_fast_path
    periodic = wb.policy.left == PERIODIC
    cache_key = (kind, part, coeff) if (exact_band and jac_cache is not None) else None
    lu = jac_cache.get(cache_key) if cache_key is not None else None
    if lu is None:
        bands = banded_fd_jacobian(flat, xf0, beta, r0=r0, linear=exact_band,
                                   periodic=periodic)
        lu, status = banded_factor(bands, beta)
        if status != 0:
            raise SingularMatrixError("stage Jacobian band has a zero pivot")
        if cache_key is not None:
            jac_cache[cache_key] = lu

    pos = getattr(model, "positive_component", None)
    if pos is not None:
        sl = wb.interior
        floor = -0.9 * np.minimum(
            wb.averages_ext[sl, pos],
            np.minimum(wb.trace_left[sl, pos], wb.trace_right[sl, pos]),
        )
    else:
        floor = None

    def G(x):
        r = residual(x)
        cand = x - banded_substitute(lu, r.ravel(), beta).reshape(shape)
        if floor is not None:
            # keep the positive component's stage values away from zero by
            # globally damping transient overshoots
            bad = cand[:, pos] < floor
            if bad.any():
                num = floor[bad] - x[bad, pos]
                den = cand[bad, pos] - x[bad, pos]
                with np.errstate(divide="ignore", invalid="ignore"):
                    theta_all = num / den
                theta_all = theta_all[np.isfinite(theta_all)]
                theta = float(np.min(theta_all, initial=1.0))
                cand = x + np.clip(theta, 0.05, 1.0) * (cand - x)
        return cand

    return solve_stage(G, guess, cfg)


# ---------------------------------------------------------------------------
# steppers


def _reconstruct(model, grid, averages, policy, order, limiter, source, profile_fn):
    return wb_reconstruct(model, np.asarray(averages, dtype=float), grid, order,
                          limiter, policy, source, profile_fn=profile_fn)


def step_dirk(model, grid, averages, dt, pair, kind, policy, cfg, source,
              limiter=MINMOD, order=None, profile_fn=None):
    """Diagonally implicit step of the fluctuation system (stiffly accurate)."""
    averages = np.asarray(averages, dtype=float)
    if order is None:
        order = 2 if pair.stages > 1 else 1
    eff_kind = kind if order == 2 else PWCR
    wb = _reconstruct(model, grid, averages, policy, order, limiter, source, profile_fn)
    a = pair.a
    stage_vals = []
    stage_L = []
    iters = []
    resids = []
    jac_cache = {}
    for k in range(pair.stages):
        base = np.zeros_like(averages)
        for l in range(k):
            base += dt * a[k][l] * stage_L[l]
        coeff = dt * a[k][k]
        guess = stage_vals[-1] if stage_vals else np.zeros_like(averages)
        x, it, res = _implicit_stage(model, wb, eff_kind, FULL, None, coeff, base, guess, cfg,
                                     jac_cache=jac_cache)
        stage_L.append((x - base) / coeff)
        stage_vals.append(x)
        iters.append(it)
        resids.append(res)
    uf = stage_vals[-1]
    stats = StepStats(dt, tuple(iters), tuple(resids), uf, wb.profile_failures())
    return averages + uf, stats


def step_backward_euler(model, grid, averages, dt, policy, cfg, source,
                        limiter=MINMOD, profile_fn=None):
    """First-order implicit step (piecewise constant reconstructions)."""
    return step_dirk(model, grid, averages, dt, ButcherPair.backward_euler(), PWCR,
                     policy, cfg, source, limiter=limiter, order=1, profile_fn=profile_fn)


def step_sdirk2(model, grid, averages, dt, kind, policy, cfg, source,
                limiter=MINMOD, profile_fn=None):
    """Second-order SDIRK step with the selected fluctuation reconstruction."""
    return step_dirk(model, grid, averages, dt, ButcherPair.sdirk2(), kind,
                     policy, cfg, source, limiter=limiter, order=2, profile_fn=profile_fn)


def step_imex(model, grid, averages, dt, pair, split_spec, kind, policy, cfg, source,
              limiter=MINMOD, order=None, profile_fn=None):
    """IMEX step: explicit tableau on the non-stiff part, DIRK on the stiff part."""
    averages = np.asarray(averages, dtype=float)
    if pair.a_ex is None:
        raise ConfigurationError("IMEX stepping needs a paired explicit tableau")
    if order is None:
        order = 2 if pair.stages > 1 else 1
    eff_kind = kind if order == 2 else PWCR
    wb = _reconstruct(model, grid, averages, policy, order, limiter, source, profile_fn)
    a, a_ex = pair.a, pair.a_ex
    l1 = []
    l2 = []
    stage_vals = []
    iters = []
    resids = []
    jac_cache = {}
    for k in range(pair.stages):
        base = np.zeros_like(averages)
        for l in range(k):
            base += dt * (a_ex[k][l] * l1[l] + a[k][l] * l2[l])
        coeff = dt * a[k][k]
        guess = stage_vals[-1] if stage_vals else np.zeros_like(averages)
        x, it, res = _implicit_stage(model, wb, eff_kind, IMPLICIT, split_spec,
                                     coeff, base, guess, cfg, jac_cache=jac_cache)
        l2.append((x - base) / coeff)
        l1.append(spatial_operator(model, wb, x, eff_kind, EXPLICIT, split_spec))
        stage_vals.append(x)
        iters.append(it)
        resids.append(res)
    uf = np.zeros_like(averages)
    for l in range(pair.stages):
        uf += dt * (pair.b_ex[l] * l1[l] + pair.b[l] * l2[l])
    stats = StepStats(dt, tuple(iters), tuple(resids), uf, wb.profile_failures())
    return averages + uf, stats


def step_imex2(model, grid, averages, dt, split_spec, kind, policy, cfg, source,
               limiter=MINMOD, profile_fn=None):
    """Second-order IMEX step with the paired tableaux."""
    return step_imex(model, grid, averages, dt, ButcherPair.imex2(), split_spec, kind,
                     policy, cfg, source, limiter=limiter, order=2, profile_fn=profile_fn)


def step_explicit(model, grid, averages, dt, order, kind, policy, cfg, source,
                  limiter=MINMOD, profile_fn=None):
    """Explicit reference step: forward Euler or Heun on the fluctuations."""
    averages = np.asarray(averages, dtype=float)
    eff_kind = kind if order == 2 else PWCR
    wb = _reconstruct(model, grid, averages, policy, order, limiter, source, profile_fn)
    zero = np.zeros_like(averages)
    l0 = spatial_operator(model, wb, zero, eff_kind, FULL)
    if order == 1:
        uf = dt * l0
    else:
        l1 = spatial_operator(model, wb, dt * l0, eff_kind, FULL)
        uf = 0.5 * dt * (l0 + l1)
    stats = StepStats(dt, (0,) * order, (0.0,) * order, uf, wb.profile_failures())
    return averages + uf, stats
