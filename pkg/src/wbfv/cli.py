"""Command-line interface.

    wb run    --case swe.test1 --scheme IWBM2 --fluctuation PWLR --cells 200 --cfl 2 --out dir/
    wb sweep  --case transport.test2 --cells 25,50,100,200,400,800,1600
    wb steady --case swe.test4 --scheme IWBM1 --cfl 10 --eps 1e-12

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 I/O error.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from ._backend import backend_name
from .errors import CollocationError, ConfigurationError, StageSolveError, WBError
from .harness import (
    config_from_mapping,
    convergence_sweep,
    l1_error,
    parse_config_text,
    run_case,
    run_to_steady_state,
    write_convergence_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _add_common(parser, cells=True):
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--case", help="builtin case name, e.g. swe.test1")
    parser.add_argument("--model", help="model shorthand (transport|burgers|swe)")
    parser.add_argument("--scheme", help="scheme name, e.g. IWBM2")
    if cells:
        parser.add_argument("--cells", help="number of cells")
    parser.add_argument("--cfl", help="CFL number")
    parser.add_argument("--tend", help="final time")
    parser.add_argument("--fluctuation", help="stage reconstruction: PWCR or PWLR")
    parser.add_argument("--limiter", help="slope limiter: minmod or avg")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--newton-iters", dest="newton_iters", help="Newton budget per stage")
    parser.add_argument("--stage-tol", dest="stage_tol", help="stage solver tolerance")
    parser.add_argument("--stage-maxiter", dest="stage_maxiter", help="stage iteration cap")


def _gather(args, extra=()):
    mapping = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            mapping.update(parse_config_text(fh.read()))
    for key in ("case", "model", "scheme", "cells", "cfl", "tend", "fluctuation",
                "limiter", "out", "newton_iters", "stage_tol", "stage_maxiter", *extra):
        val = getattr(args, key, None)
        if val is not None:
            mapping[key] = val
    return config_from_mapping(mapping)


def _cmd_run(args):
    config = _gather(args, extra=("snapshots",))
    result = run_case(config)
    print(f"case={config.case} scheme={config.scheme} fluctuation={config.fluctuation} "
          f"cells={config.n_cells} cfl={config.cfl} backend={backend_name()}")
    print(f"steps={result.steps} fixed_point_iterations={result.fixed_point_total} "
          f"elapsed={result.elapsed:.3f}s")
    if config.reference is not None:
        err = l1_error(result.final, np.asarray(config.reference(result.grid)), result.grid)
        print("l1_error_vs_reference: " + " ".join(f"{e:.3e}" for e in err))
    if config.out_dir:
        print(f"outputs written to {config.out_dir}")
    return EXIT_OK


def _cmd_sweep(args):
    config = _gather(args)
    cells = [int(s) for s in args.sweep_cells.split(",") if s]
    if len(cells) < 2:
        raise ConfigurationError("sweep needs at least two mesh sizes")
    ref_cells = int(args.ref_cells) if args.ref_cells else 4 * max(cells)
    table = convergence_sweep(config, cells, ref_cells)
    header = f"{'cells':>6}"
    for c in table.components:
        header += f" {'err_' + c:>12} {'ord_' + c:>8}"
    print(header)
    for n, errs, orders in table.rows():
        row = f"{n:>6}"
        for j in range(len(table.components)):
            o = "" if np.isnan(orders[j]) else f"{orders[j]:.2f}"
            row += f" {errs[j]:>12.4e} {o:>8}"
        print(row)
    if config.out_dir:
        import pathlib

        out = pathlib.Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "convergence.csv"
        write_convergence_csv(table, path)
        print(f"table written to {path}")
    return EXIT_OK


def _cmd_steady(args):
    config = _gather(args)
    if args.max_steps:
        config = replace(config, max_steps=int(args.max_steps))
    eps = float(args.eps)
    result = run_to_steady_state(config, eps)
    status = "converged" if result.converged else "NOT CONVERGED"
    print(f"case={config.case} scheme={config.scheme} cfl={config.cfl} eps={eps:g}: {status}")
    print(f"time={result.time:.6f}s steps={result.steps} "
          f"fixed_point_iterations={result.fixed_point_total} elapsed={result.elapsed:.3f}s")
    if config.reference is not None:
        err = l1_error(result.final, np.asarray(config.reference(result.grid)), result.grid)
        print("l1_error_vs_steady_reference: " + " ".join(f"{e:.3e}" for e in err))
    return EXIT_OK if result.converged else EXIT_SOLVER


def build_parser():
    parser = argparse.ArgumentParser(prog="wb", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one case to its final time")
    _add_common(p_run)
    p_run.add_argument("--snapshots", help="comma-separated snapshot times")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="dyadic refinement sweep")
    _add_common(p_sweep, cells=False)
    p_sweep.add_argument("--cells", dest="sweep_cells", required=True,
                         help="comma-separated mesh sizes")
    p_sweep.add_argument("--ref-cells", dest="ref_cells",
                         help="reference mesh size (default 4x finest)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_steady = sub.add_parser("steady", help="march to a steady state")
    _add_common(p_steady)
    p_steady.add_argument("--eps", default="1e-12", help="stopping threshold")
    p_steady.add_argument("--max-steps", dest="max_steps", help="step budget")
    p_steady.set_defaults(func=_cmd_steady)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StageSolveError, CollocationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except WBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
