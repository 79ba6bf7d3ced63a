"""Timing comparison: numba kernels vs the pure-numpy fallbacks.

The two hot kernels are the implicit-midpoint profile marching (per-cell
loops under numba, vectorized across cells under numpy) and the banded LU
factor/substitute pair.  Run with::

    python benchmarks/bench_backends.py [--cells 1600] [--repeats 5]

Setting ``WBFV_NO_NUMBA=1`` switches the package itself to the numpy path;
this script always times both flavors directly, so it works either way.
"""

import argparse
import time

import numpy as np

from wbfv import _kernels
from wbfv._backend import NUMBA_ENABLED, backend_name
from wbfv.models import ExpCos, ShallowWaterModel


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_march(cells, repeats):
    model = ShallowWaterModel(manning_k=0.01, depth=ExpCos())
    mid, mp, dk, dp = model.numba_spec()
    xs = np.linspace(0.005, 0.995, cells)
    us = np.column_stack([np.full(cells, 0.3), np.full(cells, 3.0)])
    dx = 1.0 / cells
    deltas = np.array([0.5 * dx, 0.5 * dx, -dx, -0.5 * dx])
    args = (mid, mp, dk, dp, xs, us, deltas, 1e-14, 100)

    t_np = _time(lambda: _kernels.march_legs_np(*args), repeats)
    result = {"numpy": t_np}
    if NUMBA_ENABLED:
        _kernels.march_legs_nb(*args)  # JIT warmup
        t_nb = _time(lambda: _kernels.march_legs_nb(*args), repeats)
        result["numba"] = t_nb
        a, _ = _kernels.march_legs_np(*args)
        b, _ = _kernels.march_legs_nb(*args)
        result["agree"] = float(np.abs(a - b).max())
    return result


def bench_banded(cells, bw, repeats):
    rng = np.random.default_rng(0)
    bands = rng.standard_normal((2 * bw + 1, cells))
    bands[bw] += 2.0 * bw + 4.0
    rhs = rng.standard_normal(cells)

    def run_np():
        work = bands.copy()
        _kernels._banded_factor_np(work, bw)
        x = rhs.copy()
        _kernels._banded_substitute_np(work, x, bw)
        return x

    result = {"numpy": _time(run_np, repeats)}
    if NUMBA_ENABLED:

        def run_nb():
            work = bands.copy()
            _kernels._banded_factor_nb(work, bw)
            x = rhs.copy()
            _kernels._banded_substitute_nb(work, x, bw)
            return x

        run_nb()  # JIT warmup
        result["numba"] = _time(run_nb, repeats)
        result["agree"] = float(np.abs(run_np() - run_nb()).max())
    return result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=1600)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    print(f"active package backend: {backend_name()}")
    if not NUMBA_ENABLED:
        print("numba unavailable or disabled; timing the numpy flavor only\n")

    rows = [("profile march", bench_march(args.cells, args.repeats))]
    for bw, label in ((1, "tridiagonal LU"), (2, "pentadiagonal LU")):
        rows.append((label, bench_banded(args.cells, bw, args.repeats)))

    header = f"{'kernel':<18} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max diff':>10}"
    print(header)
    print("-" * len(header))
    for name, r in rows:
        np_ms = 1e3 * r["numpy"]
        if "numba" in r:
            nb_ms = 1e3 * r["numba"]
            print(f"{name:<18} {np_ms:>12.3f} {nb_ms:>12.3f} "
                  f"{r['numpy'] / r['numba']:>8.1f}x {r['agree']:>10.1e}")
        else:
            print(f"{name:<18} {np_ms:>12.3f} {'-':>12} {'-':>9} {'-':>10}")


if __name__ == "__main__":
    main()
