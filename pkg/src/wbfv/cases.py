"""Built-in experiment configurations.

Each case fixes the model, domain, mesh, CFL, final time, boundary policy and
initial data of one standard experiment; scheme, fluctuation kind and solver
settings keep sensible defaults and are meant to be overridden from the CLI.
Names follow ``<model>.test<k>``.
"""

import numpy as np

from .errors import ConfigurationError
from .grid import BoundaryPolicy
from .harness import RunConfig
from .models import BurgersModel, CosBump, ExpCos, Gaussian, ShallowWaterModel, TransportModel
from .reconstruction import PWLR
from .stationary import steady_state_cells
from .steppers import SolverConfig


def _exp_ic(grid):
    return np.exp(grid.centers())[:, None]


def _scalar_ic(fn):
    return lambda grid: fn(grid.centers())[:, None]


def _steady_ic(model, anchor, state):
    def ic(grid):
        x = grid.x_left if anchor == "left" else grid.x_right
        return steady_state_cells(model, grid, x, np.asarray(state, dtype=float))

    return ic


def _transport_test1():
    model = TransportModel(c=1.0, alpha=1.0)
    return RunConfig(
        model=model, x_left=0.0, x_right=2.0, n_cells=200, cfl=2.0, t_end=1.0,
        scheme="IEWBM1", ic=_exp_ic, ic_name="exp",
        boundary=BoundaryPolicy.stationary(), reference=_exp_ic,
        case="transport.test1",
    )


def _transport_test2():
    model = TransportModel(c=1.0, alpha=1.0)
    ic = _scalar_ic(lambda x: np.exp(x) + 0.5 * np.exp(-100.0 * (x - 0.3) ** 2))
    return RunConfig(
        model=model, x_left=0.0, x_right=2.0, n_cells=200, cfl=2.0, t_end=1.0,
        scheme="IEWBM2", fluctuation=PWLR, ic=ic, ic_name="exp+bump",
        boundary=BoundaryPolicy.stationary(), reference=_exp_ic,
        pin_boundary="left", case="transport.test2",
    )


def _burgers_test1():
    model = BurgersModel(alpha=1.0)
    return RunConfig(
        model=model, x_left=0.0, x_right=2.0, n_cells=200, cfl=2.0, t_end=1.0,
        scheme="IEWBM2", fluctuation=PWLR, ic=_exp_ic, ic_name="exp",
        boundary=BoundaryPolicy.stationary(), reference=_exp_ic,
        solver=SolverConfig(newton_iters=12), case="burgers.test1",
    )


def _burgers_test2():
    model = BurgersModel(alpha=1.0)
    ic = _scalar_ic(lambda x: np.exp(x) + 0.4 * np.exp(-25.0 * (x - 0.4) ** 2))
    return RunConfig(
        model=model, x_left=0.0, x_right=2.0, n_cells=400, cfl=2.0, t_end=10.0,
        scheme="IEWBM2", fluctuation=PWLR, ic=ic, ic_name="exp+bump",
        boundary=BoundaryPolicy.stationary(), reference=_exp_ic,
        pin_boundary="left", solver=SolverConfig(newton_iters=12),
        case="burgers.test2",
    )


def _burgers_test3():
    model = BurgersModel(alpha=1.0)
    ic = _scalar_ic(lambda x: 0.1 * np.exp(x) + 0.5 * np.exp(-25.0 * (x - 1.0) ** 2))
    return RunConfig(
        model=model, x_left=0.0, x_right=2.0, n_cells=200, cfl=2.0, t_end=0.5,
        scheme="IEWBM2", fluctuation=PWLR, ic=ic, ic_name="smooth-order-test",
        boundary=BoundaryPolicy.stationary(),
        solver=SolverConfig(newton_iters=12), case="burgers.test3",
    )


def _swe_test1():
    model = ShallowWaterModel(g=9.81, manning_k=0.0, depth=CosBump())
    # subcritical steady inflow: h = 2 + H at the left edge, q = 3.5
    ic = _steady_ic(model, "left", (2.0, 3.5))
    return RunConfig(
        model=model, x_left=0.0, x_right=3.0, n_cells=200, cfl=2.0, t_end=1.0,
        scheme="IWBM2", fluctuation=PWLR, ic=ic, ic_name="subcritical-steady",
        boundary=BoundaryPolicy.stationary(), reference=ic,
        case="swe.test1",
    )


def _swe_test2():
    model = ShallowWaterModel(g=9.81, manning_k=0.0, depth=Gaussian())

    def ic(grid):
        x = grid.centers()
        h = model.H(x) + 0.1 * np.exp(-5.0 * x * x)
        return np.column_stack([h, np.zeros_like(x)])

    return RunConfig(
        model=model, x_left=-5.0, x_right=5.0, n_cells=200, cfl=2.0, t_end=0.5,
        scheme="IWBM2", fluctuation=PWLR, ic=ic, ic_name="surface-bump",
        boundary=BoundaryPolicy.transmissive(), case="swe.test2",
    )


def _swe_test3():
    model = ShallowWaterModel(g=9.81, manning_k=0.0, depth=Gaussian())

    def ic(grid):
        x = grid.centers()
        h = model.H(x) + np.where(np.abs(x) < 1.0, 0.1, 0.0)
        return np.column_stack([h, np.zeros_like(x)])

    return RunConfig(
        model=model, x_left=-5.0, x_right=5.0, n_cells=200, cfl=2.0, t_end=0.5,
        scheme="IWBM2", fluctuation=PWLR, ic=ic, ic_name="double-shock",
        boundary=BoundaryPolicy.transmissive(), case="swe.test3",
    )


def _swe_test4():
    model = ShallowWaterModel(g=9.81, manning_k=0.0, depth=CosBump())

    def ic(grid):
        x = grid.centers()
        return np.column_stack([np.full_like(x, 2.0), np.zeros_like(x)])

    def reference(grid):
        # subcritical steady state pinned by the boundary data q=1, h(right)=2
        return steady_state_cells(model, grid, grid.x_right, np.array([2.0, 1.0]))

    return RunConfig(
        model=model, x_left=0.0, x_right=3.0, n_cells=100, cfl=2.0, t_end=150.0,
        scheme="IWBM1", ic=ic, ic_name="still-start",
        boundary=BoundaryPolicy.dirichlet(left={1: 1.0}, right={0: 2.0}),
        reference=reference, case="swe.test4",
    )


def _swe_test5():
    model = ShallowWaterModel(g=9.81, manning_k=0.01, depth=ExpCos())
    ic = _steady_ic(model, "left", (0.3, 3.0))
    return RunConfig(
        model=model, x_left=0.0, x_right=1.0, n_cells=100, cfl=2.0, t_end=1.0,
        scheme="IWBM2", fluctuation=PWLR, ic=ic, ic_name="supercritical-steady",
        boundary=BoundaryPolicy.stationary(), reference=ic,
        case="swe.test5",
    )


def _swe_test6():
    model = ShallowWaterModel(g=9.81, manning_k=0.01, depth=ExpCos())
    steady = _steady_ic(model, "left", (0.3, 3.0))

    def ic(grid):
        u = steady(grid).copy()
        x = grid.centers()
        mask = ((x >= 2.0 / 7.0) & (x <= 3.0 / 7.0)) | ((x >= 4.0 / 7.0) & (x <= 5.0 / 7.0))
        u[mask, 0] += 0.05
        u[mask, 1] += 0.5
        return u

    return RunConfig(
        model=model, x_left=0.0, x_right=1.0, n_cells=100, cfl=0.9, t_end=2.0,
        scheme="SIWBM2", fluctuation=PWLR, ic=ic, ic_name="perturbed-supercritical",
        boundary=BoundaryPolicy.stationary(), reference=steady,
        case="swe.test6",
    )


_BUILDERS = {
    "transport.test1": _transport_test1,
    "transport.test2": _transport_test2,
    "burgers.test1": _burgers_test1,
    "burgers.test2": _burgers_test2,
    "burgers.test3": _burgers_test3,
    "swe.test1": _swe_test1,
    "swe.test2": _swe_test2,
    "swe.test3": _swe_test3,
    "swe.test4": _swe_test4,
    "swe.test5": _swe_test5,
    "swe.test6": _swe_test6,
}


def names():
    return sorted(_BUILDERS)


def make(name):
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown case {name!r}; available: {', '.join(names())}"
        ) from None
    return builder()
