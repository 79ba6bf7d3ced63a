"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The suite exercises the
full solver stack at the production mesh sizes, so it takes a few minutes;
everything is deterministic.
"""

import functools
from dataclasses import replace

import numpy as np
import pytest

from wbfv.grid import BoundaryPolicy, build_grid
from wbfv.harness import (
    builtin_case,
    l1_error,
    restrict_averages,
    run_case,
    run_to_steady_state,
)
from wbfv.models import (
    FULLY_IMPLICIT,
    BurgersModel,
    Gaussian,
    ShallowWaterModel,
    TransportModel,
    split,
)
from wbfv.reconstruction import avg, minmod, frozen_phis, qtilde_traces, wb_reconstruct
from wbfv.numflux import rusanov
from wbfv.stationary import collocated_profile, exact_profile, extension_fn
from wbfv.steppers import (
    ButcherPair,
    SolverConfig,
    solve_stage,
    spatial_operator,
    step_backward_euler,
    step_imex,
    step_sdirk2,
)

WB_TOL = 1e-11
RECOVERY_TOL = 1e-11
RACE_STATE_TOL = 1e-10
ORDER1_BAND = 0.8
ORDER2_BAND = 1.8


def _report(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def _drift(config):
    res = run_case(config)
    ref = np.asarray(config.reference(res.grid), dtype=float)
    return float(l1_error(res.final, ref, res.grid).max())


# ---------------------------------------------------------------------------
# criterion 1: well-balanced preservation


def test_criterion_1_well_balanced_preservation():
    worst = {}
    t1 = builtin_case("transport.test1")
    for scheme, kind in [("IEWBM1", "pwcr"), ("IEWBM2", "pwcr"), ("IEWBM2", "pwlr")]:
        worst[f"transport {scheme}/{kind}"] = _drift(
            replace(t1, scheme=scheme, fluctuation=kind))
    b1 = builtin_case("burgers.test1")
    for scheme, kind, ni in [("IEWBM1", "pwcr", 1), ("IEWBM2", "pwcr", 12),
                             ("IEWBM2", "pwlr", 12)]:
        worst[f"burgers {scheme}/{kind}"] = _drift(
            replace(b1, scheme=scheme, fluctuation=kind,
                    solver=SolverConfig(newton_iters=ni)))
    swe_schemes = [("IWBM1", "pwcr"), ("IWBM2", "pwcr"), ("IWBM2", "pwlr"),
                   ("SIWBM1", "pwcr"), ("SIWBM2", "pwcr"), ("SIWBM2", "pwlr")]
    s1 = builtin_case("swe.test1")
    for scheme, kind in swe_schemes:
        worst[f"swe1 {scheme}/{kind}"] = _drift(
            replace(s1, scheme=scheme, fluctuation=kind))
    s5 = builtin_case("swe.test5")
    for scheme, kind in swe_schemes:
        cfl = 0.9 if scheme.startswith("SI") else 2.0
        worst[f"swe5 {scheme}/{kind}"] = _drift(
            replace(s5, scheme=scheme, fluctuation=kind, cfl=cfl))
    peak = max(worst.values())
    ok = peak <= WB_TOL
    _report(1, ok, f"L1 steady drift <= {WB_TOL:g} on {len(worst)} runs "
                   f"(worst {peak:.2e}: "
                   f"{max(worst, key=worst.get)})")


# ---------------------------------------------------------------------------
# criterion 2: perturbation recovery


def test_criterion_2_perturbation_recovery():
    worst = {}
    t2 = builtin_case("transport.test2")
    for scheme, kind in [("IEWBM1", "pwcr"), ("IEWBM2", "pwcr"), ("IEWBM2", "pwlr")]:
        worst[f"transport {scheme}/{kind}"] = _drift(
            replace(t2, scheme=scheme, fluctuation=kind, n_cells=400, t_end=5.0))
    b2 = builtin_case("burgers.test2")
    for scheme, kind, ni in [("IEWBM1", "pwcr", 1), ("IEWBM2", "pwcr", 12),
                             ("IEWBM2", "pwlr", 12)]:
        worst[f"burgers {scheme}/{kind}"] = _drift(
            replace(b2, scheme=scheme, fluctuation=kind,
                    solver=SolverConfig(newton_iters=ni)))
    s6 = builtin_case("swe.test6")
    for scheme, kind in [("SIWBM1", "pwcr"), ("SIWBM2", "pwcr"), ("SIWBM2", "pwlr"),
                         ("IWBM1", "pwcr"), ("IWBM2", "pwlr")]:
        cfl = 0.9 if scheme.startswith("SI") else 2.0
        worst[f"swe6 {scheme}/{kind}"] = _drift(
            replace(s6, scheme=scheme, fluctuation=kind, cfl=cfl))
    peak = max(worst.values())
    ok = peak <= RECOVERY_TOL
    _report(2, ok, f"post-perturbation L1 distance to the steady state <= "
                   f"{RECOVERY_TOL:g} on {len(worst)} runs (worst {peak:.2e})")


# ---------------------------------------------------------------------------
# criterion 3: convergence orders


def _sweep_against_reference(config, cells, ref_final, ref_cells):
    errors = []
    for n in cells:
        res = run_case(replace(config, n_cells=n))
        errors.append(l1_error(res.final, restrict_averages(ref_final, n), res.grid))
    return np.asarray(errors)


def _mean_order(errors):
    # mean pairwise order over the three finest meshes, per component
    e = np.asarray(errors)[-3:]
    return np.log2(e[0] / e[-1]) / (e.shape[0] - 1)


@functools.lru_cache(maxsize=None)
def _reference_run(case, scheme, cells, tend, limiter):
    config = replace(builtin_case(case), scheme=scheme, fluctuation="pwlr",
                     limiter=limiter, n_cells=cells, t_end=tend)
    return run_case(config).final


def test_criterion_3_convergence_orders():
    results = {}

    ref = _reference_run("transport.test2", "IEWBM2", 12800, 1.0, "avg")
    cfg = replace(builtin_case("transport.test2"), limiter="avg")
    errs = _sweep_against_reference(replace(cfg, scheme="IEWBM1"),
                                    [1600, 3200, 6400], ref, 12800)
    results["transport IEWBM1"] = (_mean_order(errs), ORDER1_BAND)
    errs = _sweep_against_reference(replace(cfg, scheme="IEWBM2", fluctuation="pwlr"),
                                    [400, 800, 1600], ref, 12800)
    results["transport IEWBM2/pwlr"] = (_mean_order(errs), ORDER2_BAND)

    # shock forms around t ~ 0.41; the order test runs on the smooth window
    ref = _reference_run("burgers.test3", "IEWBM2", 3200, 0.3, "avg")
    cfg = replace(builtin_case("burgers.test3"), limiter="avg", t_end=0.3)
    errs = _sweep_against_reference(replace(cfg, scheme="IEWBM1"),
                                    [200, 400, 800], ref, 3200)
    results["burgers IEWBM1"] = (_mean_order(errs), ORDER1_BAND)
    errs = _sweep_against_reference(replace(cfg, scheme="IEWBM2", fluctuation="pwlr"),
                                    [200, 400, 800], ref, 3200)
    results["burgers IEWBM2/pwlr"] = (_mean_order(errs), ORDER2_BAND)

    ref = _reference_run("swe.test2", "IWBM2", 6400, 0.5, "avg")
    cfg = replace(builtin_case("swe.test2"), limiter="avg")
    for scheme in ("IWBM1", "SIWBM1"):
        errs = _sweep_against_reference(replace(cfg, scheme=scheme),
                                        [400, 800, 1600], ref, 6400)
        results[f"swe {scheme}"] = (_mean_order(errs), ORDER1_BAND)
    for scheme in ("IWBM2", "SIWBM2"):
        errs = _sweep_against_reference(
            replace(cfg, scheme=scheme, fluctuation="pwlr"),
            [100, 200, 400], ref, 6400)
        results[f"swe {scheme}/pwlr"] = (_mean_order(errs), ORDER2_BAND)

    ok = True
    pieces = []
    for name, (orders, band) in results.items():
        omin = float(np.min(orders))
        ok &= omin >= band
        pieces.append(f"{name}: {omin:.2f}>={band}")
    _report(3, ok, "observed orders on the three finest meshes per component -- "
                   + "; ".join(pieces))


# ---------------------------------------------------------------------------
# criterion 4: steady-state race


@functools.lru_cache(maxsize=None)
def _race(scheme, cfl):
    config = replace(builtin_case("swe.test4"), scheme=scheme, cfl=cfl)
    res = run_to_steady_state(config, 1e-12, max_steps=120_000)
    err = float(l1_error(res.final, config.reference(res.grid), res.grid).max())
    return res.converged, res.steps, res.fixed_point_total, err


def test_criterion_4_steady_state_race():
    runs = {("EXWBM1", 0.99): _race("EXWBM1", 0.99)}
    for cfl in (2.0, 10.0, 20.0, 50.0):
        runs[("IWBM1", cfl)] = _race("IWBM1", cfl)
    ok = all(r[0] for r in runs.values())
    worst_state = max(r[3] for r in runs.values())
    ok &= worst_state <= RACE_STATE_TOL
    explicit_steps = runs[("EXWBM1", 0.99)][1]
    implicit_steps = [runs[("IWBM1", c)][1] for c in (2.0, 10.0, 20.0, 50.0)]
    ratio = explicit_steps / implicit_steps[1]
    ok &= ratio >= 10.0
    monotone = all(a > b for a, b in zip(implicit_steps, implicit_steps[1:]))
    ok &= monotone
    detail = (f"reached states <= {RACE_STATE_TOL:g} (worst {worst_state:.2e}); "
              f"explicit/implicit step ratio {ratio:.1f} >= 10 "
              f"({explicit_steps} vs {implicit_steps[1]}); implicit steps "
              f"{implicit_steps} monotone={monotone}")
    _report(4, ok, detail)


# ---------------------------------------------------------------------------
# criterion 5: oracle equivalences


def test_criterion_5_oracle_equivalences():
    ok = True
    details = []

    # (a) banded direct solve vs iterative stage solve on linear transport
    model = TransportModel(c=1.0, alpha=1.0)
    pol = BoundaryPolicy.stationary()
    pf = extension_fn(model, "exact")
    diffs = []
    for n in (8, 200):
        g = build_grid(0.0, 2.0, n)
        u0 = (np.exp(g.centers()) + 0.3 * np.sin(np.pi * g.centers()))[:, None]
        dt = 2.0 * g.dx
        fast, _ = step_backward_euler(model, g, u0, dt, pol, SolverConfig(),
                                      "exact", profile_fn=pf)
        slow, _ = step_backward_euler(model, g, u0, dt, pol,
                                      SolverConfig(linear_fast_path=False),
                                      "exact", profile_fn=pf)
        diffs.append(np.abs(fast - slow).max())
    ok_a = max(diffs) <= 1e-11
    ok &= ok_a
    details.append(f"(a) direct vs iterative {max(diffs):.2e}<=1e-11")

    # (b) degenerate fully-implicit IMEX matches SDIRK2
    m = ShallowWaterModel(depth=Gaussian())
    g = build_grid(-5.0, 5.0, 50)
    rng = np.random.default_rng(42)
    x = g.centers()
    u0 = np.column_stack([m.H(x) + 0.3 + 0.1 * rng.random(50),
                          0.2 * rng.standard_normal(50)])
    spec = split(m, FULLY_IMPLICIT)
    polt = BoundaryPolicy.transmissive()
    worst_b = 0.0
    for kind in ("pwcr", "pwlr"):
        a, _ = step_sdirk2(m, g, u0, 0.01, kind, polt, SolverConfig(), "collocated")
        b, _ = step_imex(m, g, u0, 0.01, ButcherPair.imex2(), spec, kind, polt,
                         SolverConfig(), "collocated", order=2)
        worst_b = max(worst_b, float(np.abs(a - b).max()))
    ok_b = worst_b <= 1e-10
    ok &= ok_b
    details.append(f"(b) degenerate IMEX vs SDIRK2 {worst_b:.2e}<=1e-10")

    # (c) collocated profiles converge to the closed forms at order >= 1.9
    worst_c = np.inf
    for model in (TransportModel(c=1.0, alpha=1.0), BurgersModel(alpha=1.0)):
        errs = []
        for n in (50, 100, 200, 400):
            g = build_grid(0.0, 2.0, n)
            val = np.array([1.3])
            pc = collocated_profile(model, g, n // 2, val)
            pe = exact_profile(model, g, n // 2, val)
            errs.append(max(np.abs(pc.centers - pe.centers).max(),
                            abs(pc.iface_left[0] - pe.iface_left[0]),
                            abs(pc.iface_right[0] - pe.iface_right[0])))
        orders = np.log2(np.asarray(errs[:-1]) / np.asarray(errs[1:]))
        worst_c = min(worst_c, float(orders.min()))
    ok_c = worst_c >= 1.9
    ok &= ok_c
    details.append(f"(c) collocation order {worst_c:.2f}>=1.9")

    _report(5, ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 6: data-free property suites


def test_criterion_6_property_suites():
    ok = True
    details = []
    rng = np.random.default_rng(0)

    # limiter identities
    a = rng.uniform(-5, 5, 400)
    b = rng.uniform(-5, 5, 400)
    mm = minmod(a, b)
    av = avg(a, b)
    lim_ok = (np.all(mm * a >= 0)
              and np.all(np.abs(mm) <= np.maximum(np.abs(a), np.abs(b)) + 1e-14)
              and np.all(np.abs(av) <= np.maximum(np.abs(a), np.abs(b)) + 1e-12)
              and np.all(minmod(a, a) == a)
              and np.all(avg(a, -a) == 0.0))
    pl, pr = frozen_phis("avg", a, b)
    lim_ok &= np.allclose(pl + pr, 1.0, atol=1e-12)
    ok &= lim_ok
    details.append(f"limiters {'ok' if lim_ok else 'FAIL'}")

    # flux consistency on 100 random states per model
    cons_ok = True
    for model in (TransportModel(c=1.3, alpha=0.5), BurgersModel(alpha=1.0),
                  ShallowWaterModel(depth=Gaussian())):
        if model.n_comp == 1:
            states = rng.uniform(-3, 3, (100, 1))
        else:
            states = np.column_stack([rng.uniform(0.2, 3.0, 100),
                                      rng.uniform(-4, 4, 100)])
        cons_ok &= bool(np.allclose(rusanov(model, states, states),
                                    model.flux(states), rtol=0, atol=1e-13))
    ok &= cons_ok
    details.append(f"flux consistency {'ok' if cons_ok else 'FAIL'}")

    # split sum-of-parts identity on random states
    m = ShallowWaterModel(depth=Gaussian())
    from wbfv.models import EXPLICIT, IMPLICIT, SEMI_IMPLICIT_PRESSURE

    spec = split(m, SEMI_IMPLICIT_PRESSURE)
    states = np.column_stack([rng.uniform(0.2, 3.0, 100), rng.uniform(-4, 4, 100)])
    split_ok = bool(np.allclose(
        spec.flux_part(EXPLICIT, states) + spec.flux_part(IMPLICIT, states),
        m.flux(states), rtol=1e-12, atol=1e-12))
    ok &= split_ok
    details.append(f"split sum {'ok' if split_ok else 'FAIL'}")

    # conservation on periodic zero-source runs, every scheme family
    cons2_ok = True
    pol = BoundaryPolicy.periodic()
    g = build_grid(0.0, 1.0, 64)
    xs = g.centers()
    cases = [
        (TransportModel(c=1.0, alpha=0.0), (2.0 + np.sin(2 * np.pi * xs))[:, None], "exact"),
        (ShallowWaterModel(), np.column_stack([2.0 + 0.1 * np.sin(2 * np.pi * xs),
                                               0.2 * np.cos(2 * np.pi * xs)]), "collocated"),
    ]
    from wbfv.steppers import step_explicit

    for model, u0, src in cases:
        dt = g.dx / float(model.max_wave_speed(u0).max())
        steppers = [
            lambda u: step_backward_euler(model, g, u, dt, pol, SolverConfig(), src),
            lambda u: step_sdirk2(model, g, u, dt, "pwlr", pol, SolverConfig(), src),
            lambda u: step_explicit(model, g, u, 0.5 * dt, 2, "pwlr", pol,
                                    SolverConfig(), src),
        ]
        if model.n_comp == 2:
            spec2 = split(model, SEMI_IMPLICIT_PRESSURE)
            steppers.append(lambda u: step_imex(model, g, u, dt, ButcherPair.imex2(),
                                                spec2, "pwlr", pol, SolverConfig(), src))
        for stepper in steppers:
            u = u0.copy()
            for _ in range(5):
                prev = u.sum(axis=0) * g.dx
                u, _ = stepper(u)
                cons2_ok &= bool(np.abs(u.sum(axis=0) * g.dx - prev).max() <= 1e-12)
    ok &= cons2_ok
    details.append(f"periodic conservation {'ok' if cons2_ok else 'FAIL'}")

    # null-state preservation of the fluctuation reconstructions
    model = TransportModel(c=1.0, alpha=1.0)
    gg = build_grid(0.0, 2.0, 16)
    u0 = np.exp(gg.centers())[:, None]
    wb = wb_reconstruct(model, u0, gg, 2, "minmod", BoundaryPolicy.transmissive(),
                        "exact")
    from wbfv.grid import fluctuation_halo

    uf0 = fluctuation_halo(np.zeros_like(u0), BoundaryPolicy.transmissive(), wb.width)
    null_ok = all(np.all(t == 0.0)
                  for kind in ("pwcr", "pwlr")
                  for t in qtilde_traces(kind, wb, uf0))
    null_ok &= bool(np.abs(wb.slope[wb.interior]).max() < 1e-10)
    ok &= null_ok
    details.append(f"null states {'ok' if null_ok else 'FAIL'}")

    # stiffly accurate last-stage identity
    pf = extension_fn(model, "exact")
    u0p = u0 + 0.1 * np.exp(-40 * (gg.centers() - 1.0) ** 2)[:, None]
    new, stats = step_sdirk2(model, gg, u0p, 0.02, "pwcr",
                             BoundaryPolicy.stationary(), SolverConfig(), "exact",
                             profile_fn=pf)
    stiff_ok = bool(np.array_equal(new, u0p + stats.fluctuation))
    ok &= stiff_ok
    details.append(f"stiff accuracy {'ok' if stiff_ok else 'FAIL'}")

    _report(6, ok, "; ".join(details))
