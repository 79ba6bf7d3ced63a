import numpy as np
import pytest

from wbfv.errors import ConfigurationError
from wbfv.models import (
    EXPLICIT,
    IMPLICIT,
    FULLY_IMPLICIT,
    SEMI_IMPLICIT_FRICTION,
    SEMI_IMPLICIT_PRESSURE,
    BurgersModel,
    ExpCos,
    Gaussian,
    ShallowWaterModel,
    TransportModel,
    split,
)
from wbfv.numflux import ViscosityRule, default_viscosity, rusanov, split_rusanov

TRANSPORT = TransportModel(c=1.0, alpha=1.0)
BURGERS = BurgersModel(alpha=1.0)
SWE = ShallowWaterModel(depth=Gaussian())
SWE_FRIC = ShallowWaterModel(manning_k=0.01, depth=ExpCos())


def _random_states(model, n, seed=0):
    rng = np.random.default_rng(seed)
    if model.n_comp == 1:
        return rng.uniform(-3.0, 3.0, (n, 1))
    return np.column_stack([rng.uniform(0.2, 3.0, n), rng.uniform(-4.0, 4.0, n)])


def test_viscosity_rule_validation():
    with pytest.raises(ConfigurationError):
        ViscosityRule("fixed", 0.0)
    with pytest.raises(ConfigurationError):
        ViscosityRule("whatever")
    assert default_viscosity(TRANSPORT).kind == "fixed"
    assert default_viscosity(BURGERS).kind == "local_max"


def test_rusanov_hand_values():
    # transport, k = |c| = 1, pair (1, 2): (3/2) - (1/2) = 1
    f = rusanov(TRANSPORT, np.array([[1.0]]), np.array([[2.0]]))
    assert f[0, 0] == pytest.approx(1.0, rel=0)
    # Burgers local max, pair (1, -1): (0.5 + 0.5)/2 + 1 = 1.5
    f = rusanov(BURGERS, np.array([[1.0]]), np.array([[-1.0]]))
    assert f[0, 0] == pytest.approx(1.5, rel=0)


@pytest.mark.parametrize("model", [TRANSPORT, BURGERS, SWE])
def test_rusanov_consistency(model):
    states = _random_states(model, 100, seed=2)
    f = rusanov(model, states, states)
    assert np.allclose(f, model.flux(states), rtol=0, atol=1e-14)


@pytest.mark.parametrize("model", [TRANSPORT, BURGERS])
def test_rusanov_monotone_in_both_slots(model):
    # with k at least max|f'| over the pair, the flux increases in the left
    # state and decreases in the right one
    rng = np.random.default_rng(7)
    eps = 1e-6
    for _ in range(60):
        ul, ur = rng.uniform(-2.0, 2.0, 2)
        k = max(model.max_wave_speed(np.array([ul])), model.max_wave_speed(np.array([ur])))
        rule = ViscosityRule.fixed(float(k) + 1e-9)
        args = (np.array([[ul]]), np.array([[ur]]))
        base = rusanov(model, *args, rule)[0, 0]
        dl = rusanov(model, np.array([[ul + eps]]), args[1], rule)[0, 0] - base
        dr = rusanov(model, args[0], np.array([[ur + eps]]), rule)[0, 0] - base
        assert dl >= -1e-12
        assert dr <= 1e-12


@pytest.mark.parametrize("model,regime", [
    (SWE, FULLY_IMPLICIT),
    (SWE, SEMI_IMPLICIT_PRESSURE),
    (SWE_FRIC, SEMI_IMPLICIT_FRICTION),
])
def test_split_rusanov_part_consistency(model, regime):
    spec = split(model, regime)
    states = _random_states(model, 50, seed=3)
    for part in (EXPLICIT, IMPLICIT):
        f = split_rusanov(model, part, spec, states, states)
        assert np.allclose(f, spec.flux_part(part, states), rtol=0, atol=1e-14)


def test_split_rusanov_parts_sum_to_full_flux_on_equal_states():
    spec = split(SWE, SEMI_IMPLICIT_PRESSURE)
    states = _random_states(SWE, 50, seed=4)
    total = (split_rusanov(SWE, EXPLICIT, spec, states, states)
             + split_rusanov(SWE, IMPLICIT, spec, states, states))
    assert np.allclose(total, SWE.flux(states), rtol=1e-13, atol=1e-12)


def test_split_rusanov_sum_identity_general_pairs():
    # explicit + implicit equals the full Rusanov flux run with k_e + k_i
    spec = split(SWE, SEMI_IMPLICIT_PRESSURE)
    left = _random_states(SWE, 40, seed=5)
    right = _random_states(SWE, 40, seed=6)
    total = (split_rusanov(SWE, EXPLICIT, spec, left, right)
             + split_rusanov(SWE, IMPLICIT, spec, left, right))
    ke = np.maximum(spec.wave_speed_part(EXPLICIT, left), spec.wave_speed_part(EXPLICIT, right))
    ki = np.maximum(spec.wave_speed_part(IMPLICIT, left), spec.wave_speed_part(IMPLICIT, right))
    expect = (0.5 * (SWE.flux(left) + SWE.flux(right))
              - 0.5 * (ke + ki)[:, None] * (right - left))
    assert np.allclose(total, expect, rtol=1e-13, atol=1e-13)


def test_friction_split_implicit_flux_is_zero():
    spec = split(SWE_FRIC, SEMI_IMPLICIT_FRICTION)
    left = _random_states(SWE_FRIC, 20, seed=8)
    right = _random_states(SWE_FRIC, 20, seed=9)
    assert np.all(split_rusanov(SWE_FRIC, IMPLICIT, spec, left, right) == 0.0)
    full = rusanov(SWE_FRIC, left, right)
    assert np.allclose(split_rusanov(SWE_FRIC, EXPLICIT, spec, left, right), full,
                       rtol=0, atol=1e-14)
