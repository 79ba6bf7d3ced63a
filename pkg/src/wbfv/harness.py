"""Experiment driver: run configurations, error norms, convergence sweeps,
steady-state runs and CSV/report output.

A :class:`RunConfig` is a declarative description of one experiment; builtin
cases (``wbfv.cases``) provide the fully populated configurations for the
standard transport / Burgers / shallow-water tests.  Configurations can also
be read from flat ``key=value`` text files (see :func:`parse_config_text`).
"""

import dataclasses
import time
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grid import STATIONARY_EXTENSION, BoundaryPolicy, build_grid
from .models import (
    FULLY_IMPLICIT,
    SEMI_IMPLICIT_FRICTION,
    SEMI_IMPLICIT_PRESSURE,
    ShallowWaterModel,
    TransportModel,
    split,
)
from .reconstruction import AVG, MINMOD, PWCR, PWLR
from .stationary import COLLOCATED, EXACT, extension_fn
from .steppers import (
    ButcherPair,
    SolverConfig,
    compute_dt,
    step_dirk,
    step_explicit,
    step_imex,
)

# scheme name -> (family, order, profile source)
SCHEME_FAMILY = {
    "EXWBM1": ("explicit", 1, COLLOCATED),
    "EXWBM2": ("explicit", 2, COLLOCATED),
    "IEWBM1": ("implicit", 1, EXACT),
    "IEWBM2": ("implicit", 2, EXACT),
    "IWBM1": ("implicit", 1, COLLOCATED),
    "IWBM2": ("implicit", 2, COLLOCATED),
    "SIEWBM1": ("imex", 1, EXACT),
    "SIEWBM2": ("imex", 2, EXACT),
    "SIWBM1": ("imex", 1, COLLOCATED),
    "SIWBM2": ("imex", 2, COLLOCATED),
}

SDIRK2_CFL_LIMIT = 1.0 + np.sqrt(2.0)


@dataclass(frozen=True)
class RunConfig:
    """Declarative experiment description."""

    model: object
    x_left: float
    x_right: float
    n_cells: int
    cfl: float
    t_end: float
    scheme: str
    ic: object
    ic_name: str = ""
    fluctuation: str = PWCR
    limiter: str = MINMOD
    boundary: BoundaryPolicy = field(default_factory=BoundaryPolicy.transmissive)
    reference: object = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    split_regime: str = None
    out_dir: str = None
    snapshot_times: tuple = ()
    case: str = None
    max_steps: int = 2_000_000
    # pin the stationary ghost extension on these sides ("left", "right",
    # "both") to the reference steady state instead of the evolving boundary
    # cell; keeps inflow data clean while a perturbation crosses the domain
    pin_boundary: str = ""

    @property
    def family(self):
        return SCHEME_FAMILY[self.scheme][0]

    @property
    def order(self):
        return SCHEME_FAMILY[self.scheme][1]

    @property
    def profile_source(self):
        return SCHEME_FAMILY[self.scheme][2]

    def resolved_split(self):
        if self.split_regime is not None:
            return self.split_regime
        if isinstance(self.model, ShallowWaterModel):
            if self.model.manning_k > 0.0:
                return SEMI_IMPLICIT_FRICTION
            return SEMI_IMPLICIT_PRESSURE
        return FULLY_IMPLICIT

    def validate(self):
        if self.scheme not in SCHEME_FAMILY:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.fluctuation not in (PWCR, PWLR):
            raise ConfigurationError(f"unknown fluctuation kind {self.fluctuation!r}")
        if self.limiter not in (MINMOD, AVG):
            raise ConfigurationError(f"unknown limiter {self.limiter!r}")
        if self.profile_source == EXACT and not getattr(self.model, "has_exact_profile", False):
            raise ConfigurationError(
                f"scheme {self.scheme} needs closed-form stationary solutions, "
                f"which {type(self.model).__name__} does not have"
            )
        if self.family == "imex" and not isinstance(self.model, ShallowWaterModel):
            raise ConfigurationError(
                "semi-implicit schemes require a model with a nontrivial splitting"
            )
        if not self.t_end > 0.0:
            raise ConfigurationError("t_end must be positive")
        if (isinstance(self.model, TransportModel) and self.order == 2
                and self.family != "explicit" and self.cfl > SDIRK2_CFL_LIMIT):
            warnings.warn(
                f"second-order implicit transport is oscillatory above CFL "
                f"{SDIRK2_CFL_LIMIT:.3f} (requested {self.cfl})",
                stacklevel=2,
            )


@dataclass
class RunResult:
    """Outputs of one run: final field plus bookkeeping."""

    final: np.ndarray
    grid: object
    config: RunConfig
    elapsed: float
    steps: int
    fixed_point_total: int
    step_stats: list
    snapshots: dict


@dataclass
class SteadyResult:
    """Outputs of a run-to-steady-state experiment."""

    final: np.ndarray
    grid: object
    config: RunConfig
    converged: bool
    time: float
    steps: int
    fixed_point_total: int
    elapsed: float


@dataclass
class ConvergenceTable:
    """Dyadic refinement results: per-mesh L1 errors and observed orders."""

    cells: list
    errors: np.ndarray  # (n_meshes, n_comp)
    orders: np.ndarray  # (n_meshes - 1, n_comp)
    components: tuple

    def rows(self):
        for i, n in enumerate(self.cells):
            order = self.orders[i - 1] if i > 0 else [np.nan] * self.errors.shape[1]
            yield n, self.errors[i], np.asarray(order)


def l1_error(a, b, grid):
    """Per-component discrete L1 distance dx * sum |a - b|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ConfigurationError(f"field shapes differ: {a.shape} vs {b.shape}")
    return grid.dx * np.abs(a - b).sum(axis=0)


def observed_order(errors):
    """log2(e_j / e_{j+1}) for a dyadic refinement sequence; nan where undefined."""
    errors = np.asarray(errors, dtype=float)
    if errors.ndim == 1:
        errors = errors[:, None]
        squeeze = True
    else:
        squeeze = False
    if errors.shape[0] < 2:
        raise ConfigurationError("need at least two errors to estimate an order")
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(errors[:-1] / errors[1:])
    orders[~np.isfinite(orders)] = np.nan
    return orders[:, 0] if squeeze else orders


def _component_names(model):
    return ("h", "q") if model.n_comp == 2 else ("u",)


def _make_stepper(config, model, grid):
    family, order, source = SCHEME_FAMILY[config.scheme]
    kind = config.fluctuation
    limiter = config.limiter
    cfg = config.solver
    policy = config.boundary
    profile_fn = None
    if STATIONARY_EXTENSION in (policy.left, policy.right):
        profile_fn = extension_fn(model, source)
        if config.pin_boundary:
            if config.reference is None:
                raise ConfigurationError("pin_boundary needs a reference steady state")
            ref_cells = np.asarray(config.reference(grid), dtype=float)
            pin_left = config.pin_boundary in ("left", "both")
            pin_right = config.pin_boundary in ("right", "both")
            base_fn = profile_fn

            def profile_fn(x_anchor, state, offsets, _base=base_fn):
                leftward = offsets[0] < 0.0
                if leftward and pin_left:
                    state = ref_cells[0]
                elif not leftward and pin_right:
                    state = ref_cells[-1]
                return _base(x_anchor, state, offsets)
    if family == "explicit":
        def stepper(avg, dt):
            return step_explicit(model, grid, avg, dt, order, kind, policy, cfg,
                                 source, limiter, profile_fn)
        return stepper
    if family == "implicit":
        pair = ButcherPair.backward_euler() if order == 1 else ButcherPair.sdirk2()

        def stepper(avg, dt):
            return step_dirk(model, grid, avg, dt, pair, kind, policy, cfg,
                             source, limiter, order, profile_fn)
        return stepper
    # imex
    spec = split(model, config.resolved_split())
    pair = ButcherPair.imex1() if order == 1 else ButcherPair.imex2()

    def stepper(avg, dt):
        return step_imex(model, grid, avg, dt, pair, spec, kind, policy, cfg,
                         source, limiter, order, profile_fn)
    return stepper


def _initial_field(config, grid):
    u0 = np.asarray(config.ic(grid), dtype=float)
    if u0.shape != (grid.n_cells, config.model.n_comp):
        raise ConfigurationError(
            f"initial condition shape {u0.shape} does not match "
            f"({grid.n_cells}, {config.model.n_comp})"
        )
    return u0


def run_case(config):
    """Run one experiment to its final time."""
    config.validate()
    grid = build_grid(config.x_left, config.x_right, config.n_cells)
    model = config.model
    u = _initial_field(config, grid)
    stepper = _make_stepper(config, model, grid)
    pending_snaps = sorted(t for t in config.snapshot_times if 0.0 < t <= config.t_end)
    snapshots = {}
    stats = []
    t = 0.0
    steps = 0
    eps_t = 1e-12 * max(1.0, abs(config.t_end))
    started = time.perf_counter()
    while t < config.t_end - eps_t:
        remaining = config.t_end - t
        dt = compute_dt(config.cfl, grid, u, model, t_remaining=remaining)
        if pending_snaps:
            dt = min(dt, pending_snaps[0] - t)
        u, st = stepper(u, dt)
        t += dt
        steps += 1
        stats.append(st)
        if pending_snaps and t >= pending_snaps[0] - eps_t:
            snapshots[pending_snaps.pop(0)] = u.copy()
        if steps > config.max_steps:
            raise ConfigurationError(f"exceeded max_steps={config.max_steps}")
    elapsed = time.perf_counter() - started
    result = RunResult(
        final=u, grid=grid, config=config, elapsed=elapsed, steps=steps,
        fixed_point_total=sum(s.fixed_point_total for s in stats),
        step_stats=stats, snapshots=snapshots,
    )
    if config.out_dir:
        write_outputs(result, config)
    return result


def run_to_steady_state(config, epsilon, max_steps=None):
    """March until max_i |u^{n+1} - u^n| / dt drops below epsilon."""
    if not epsilon > 0.0:
        raise ConfigurationError("steady-state threshold must be positive")
    config.validate()
    grid = build_grid(config.x_left, config.x_right, config.n_cells)
    model = config.model
    u = _initial_field(config, grid)
    stepper = _make_stepper(config, model, grid)
    budget = max_steps if max_steps is not None else config.max_steps
    t = 0.0
    steps = 0
    iters = 0
    converged = False
    started = time.perf_counter()
    while steps < budget:
        dt = compute_dt(config.cfl, grid, u, model)
        u, st = stepper(u, dt)
        t += dt
        steps += 1
        iters += st.fixed_point_total
        rate = float(np.max(np.abs(st.fluctuation))) / dt
        if rate < epsilon:
            converged = True
            break
    elapsed = time.perf_counter() - started
    return SteadyResult(
        final=u, grid=grid, config=config, converged=converged, time=t,
        steps=steps, fixed_point_total=iters, elapsed=elapsed,
    )


def restrict_averages(fine, n_coarse):
    """Cell-average restriction from a dyadically finer mesh."""
    fine = np.asarray(fine, dtype=float)
    n_fine = fine.shape[0]
    if n_fine % n_coarse != 0:
        raise ConfigurationError(f"{n_fine} cells do not restrict to {n_coarse}")
    factor = n_fine // n_coarse
    return fine.reshape(n_coarse, factor, fine.shape[1]).mean(axis=1)


def convergence_sweep(config, cells_list, ref_cells, ref_scheme=None, ref_fluctuation=PWLR):
    """Refinement sweep against an in-tool fine-mesh reference solution.

    The reference is run with the second-order PWLR scheme of the same
    profile family and restricted to each coarse mesh by cell averaging.
    """
    cells_list = sorted(int(n) for n in cells_list)
    if ref_scheme is None:
        ref_scheme = "IEWBM2" if getattr(config.model, "has_exact_profile", False) else "IWBM2"
    ref_config = replace(config, n_cells=int(ref_cells), scheme=ref_scheme,
                         fluctuation=ref_fluctuation, out_dir=None, snapshot_times=())
    ref = run_case(ref_config)
    errors = []
    for n in cells_list:
        res = run_case(replace(config, n_cells=n, out_dir=None, snapshot_times=()))
        target = restrict_averages(ref.final, n)
        errors.append(l1_error(res.final, target, res.grid))
    errors = np.asarray(errors)
    orders = observed_order(errors)
    # orders are only meaningful between consecutive dyadic meshes
    for j in range(len(cells_list) - 1):
        if cells_list[j + 1] != 2 * cells_list[j]:
            orders[j] = np.nan
    return ConvergenceTable(
        cells=cells_list, errors=errors, orders=orders,
        components=_component_names(config.model),
    )


def builtin_case(name):
    """Fully populated RunConfig for one of the named standard experiments."""
    from . import cases

    return cases.make(name)


# ---------------------------------------------------------------------------
# outputs


def _field_columns(model, grid, data):
    x = grid.centers()
    cols = [("x", x)]
    if model.n_comp == 1:
        cols.append(("u", data[:, 0]))
    else:
        h, q = data[:, 0], data[:, 1]
        depth = model.H(x)
        cols += [("h", h), ("q", q), ("eta", h - depth), ("bottom", -depth)]
    return cols


def _write_csv(path, columns):
    header = ",".join(name for name, _ in columns)
    table = np.column_stack([np.asarray(vals, dtype=float) for _, vals in columns])
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17e}" for v in row) + "\n")


def write_outputs(result, config=None):
    """Write the final field (and snapshots) as CSV plus a run summary."""
    config = config or result.config
    if not config.out_dir:
        raise ConfigurationError("no output directory configured")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = config.model
    grid = result.grid
    ref = None
    if config.reference is not None:
        ref = np.asarray(config.reference(grid), dtype=float)

    def columns_for(data):
        cols = _field_columns(model, grid, data)
        if ref is not None:
            names = _component_names(model)
            cols += [(f"{c}_ref", ref[:, j]) for j, c in enumerate(names)]
        return cols

    paths = [out / "solution.csv"]
    _write_csv(paths[0], columns_for(result.final))
    for t_snap, data in sorted(result.snapshots.items()):
        p = out / f"snapshot_t{t_snap:g}.csv"
        _write_csv(p, columns_for(data))
        paths.append(p)
    summary = out / "summary.txt"
    with open(summary, "w", encoding="ascii") as fh:
        fh.write(f"case: {config.case or '(custom)'}\n")
        fh.write(f"scheme: {config.scheme}  fluctuation: {config.fluctuation}  "
                 f"limiter: {config.limiter}\n")
        fh.write(f"cells: {config.n_cells}  cfl: {config.cfl}  t_end: {config.t_end}\n")
        fh.write(f"steps: {result.steps}  fixed_point_iterations: "
                 f"{result.fixed_point_total}\n")
        fh.write(f"elapsed_seconds: {result.elapsed:.6f}\n")
        if ref is not None:
            err = l1_error(result.final, ref, grid)
            names = _component_names(model)
            for name, e in zip(names, err):
                fh.write(f"l1_error_{name}: {e:.17e}\n")
    paths.append(summary)
    return paths


def write_convergence_csv(table, path):
    """Convergence table as CSV: cells, per-component error and order columns."""
    with open(path, "w", encoding="ascii") as fh:
        header = ["cells"]
        for c in table.components:
            header += [f"error_{c}", f"order_{c}"]
        fh.write(",".join(header) + "\n")
        for n, errs, orders in table.rows():
            row = [str(n)]
            for j in range(len(table.components)):
                row.append(f"{errs[j]:.17e}")
                row.append("" if np.isnan(orders[j]) else f"{orders[j]:.4f}")
            fh.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# key=value configuration files


_CONFIG_KEYS = (
    "case", "model", "scheme", "cells", "cfl", "tend", "fluctuation",
    "limiter", "out", "snapshots", "newton_iters", "stage_tol",
    "stage_maxiter", "linear_fast_path", "max_steps",
)


def parse_config_text(text):
    """Parse flat ``key=value`` lines; '#' starts a comment, blanks ignored."""
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        mapping[key] = value
    return mapping


def config_from_mapping(mapping):
    """Build a RunConfig from parsed key=value pairs (case plus overrides)."""
    mapping = dict(mapping)
    case_name = mapping.pop("case", None)
    model_name = mapping.pop("model", None)
    if case_name is None:
        if model_name is None:
            raise ConfigurationError("configuration needs a case= (or model=) entry")
        case_name = f"{model_name}.test1"
    config = builtin_case(case_name)
    if model_name is not None and not case_name.startswith(model_name):
        raise ConfigurationError(
            f"case {case_name!r} does not belong to model {model_name!r}"
        )
    updates = {}
    solver_updates = {}
    for key, value in mapping.items():
        if key == "cells":
            updates["n_cells"] = int(value)
        elif key == "cfl":
            updates["cfl"] = float(value)
        elif key == "tend":
            updates["t_end"] = float(value)
        elif key == "scheme":
            updates["scheme"] = value.upper()
        elif key == "fluctuation":
            updates["fluctuation"] = value.lower()
        elif key == "limiter":
            updates["limiter"] = value.lower()
        elif key == "out":
            updates["out_dir"] = value
        elif key == "snapshots":
            updates["snapshot_times"] = tuple(float(s) for s in value.split(",") if s)
        elif key == "max_steps":
            updates["max_steps"] = int(value)
        elif key == "newton_iters":
            solver_updates["newton_iters"] = int(value)
        elif key == "stage_tol":
            solver_updates["stage_tol"] = float(value)
        elif key == "stage_maxiter":
            solver_updates["stage_maxiter"] = int(value)
        elif key == "linear_fast_path":
            solver_updates["linear_fast_path"] = value.lower() in ("1", "true", "yes")
    if solver_updates:
        updates["solver"] = dataclasses.replace(config.solver, **solver_updates)
    return replace(config, **updates) if updates else config
