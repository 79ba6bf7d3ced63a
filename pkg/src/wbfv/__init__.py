"""Well-balanced implicit and semi-implicit finite-volume schemes for 1D
systems of balance laws: transport, Burgers with a nonlinear source and
shallow water with Manning friction."""

from ._backend import NUMBA_ENABLED, backend_name
from .errors import (
    CollocationError,
    ConfigurationError,
    CriticalFlowError,
    SingularMatrixError,
    StageSolveError,
    StateError,
    WBError,
)
from .grid import BoundaryPolicy, Grid, Quadrature, build_grid, extend_with_ghosts
from .harness import (
    ConvergenceTable,
    RunConfig,
    RunResult,
    SteadyResult,
    builtin_case,
    convergence_sweep,
    l1_error,
    observed_order,
    run_case,
    run_to_steady_state,
    write_outputs,
)
from .models import (
    BurgersModel,
    CosBump,
    ExpCos,
    Flat,
    Gaussian,
    ShallowWaterModel,
    SplitSpec,
    TransportModel,
    flux,
    froude,
    max_wave_speed,
    source_geom,
    source_plain,
    split,
    stationary_slope,
)
from .numflux import ViscosityRule, rusanov, split_rusanov
from .reconstruction import (
    avg,
    fluctuation_traces,
    minmod,
    stage_interface_states,
    wb_reconstruct,
)
from .stationary import (
    StationaryProfile,
    collocated_profile,
    collocation_step,
    exact_profile,
    march_trajectory,
    steady_state_cells,
)
from .steppers import (
    ButcherPair,
    SolverConfig,
    StepStats,
    compute_dt,
    solve_banded,
    solve_stage,
    spatial_operator,
    step_backward_euler,
    step_explicit,
    step_imex,
    step_imex2,
    step_sdirk2,
)

__version__ = "0.1.0"
