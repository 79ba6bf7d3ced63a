import numpy as np
import pytest

from wbfv.errors import ConfigurationError
from wbfv.grid import (
    BoundaryPolicy,
    Quadrature,
    build_grid,
    extend_with_ghosts,
    fluctuation_halo,
)


def test_build_grid_basic():
    g = build_grid(0.0, 2.0, 200)
    assert g.dx == pytest.approx(0.01, abs=0.0)
    assert g.cell_center(0) == pytest.approx(0.005, abs=0.0)
    assert g.interface(0) == 0.0
    assert g.interface(200) == 2.0


def test_build_grid_wide_domain():
    g = build_grid(-5.0, 5.0, 200)
    assert g.dx == pytest.approx(0.05)


def test_build_grid_rejects_degenerate():
    with pytest.raises(ConfigurationError):
        build_grid(0.0, 1.0, 2)
    with pytest.raises(ConfigurationError):
        build_grid(1.0, 1.0, 10)
    with pytest.raises(ConfigurationError):
        build_grid(2.0, 1.0, 10)


def test_grid_centers_and_interfaces_consistent():
    g = build_grid(-1.0, 3.0, 17)
    x = g.centers()
    xi = g.interfaces()
    assert x.shape == (17,)
    assert xi.shape == (18,)
    assert np.allclose(np.diff(xi), g.dx, rtol=0, atol=1e-15)
    assert np.allclose(0.5 * (xi[:-1] + xi[1:]), x, rtol=0, atol=1e-15)


def test_quadrature_midpoint():
    q = Quadrature.midpoint()
    assert q.nodes == (0.5,)
    assert q.weights == (1.0,)
    g = build_grid(0.0, 1.0, 4)
    assert q.cell_nodes(g, 0)[0] == pytest.approx(g.cell_center(0))


def test_quadrature_weights_must_sum_to_one():
    with pytest.raises(ConfigurationError):
        Quadrature((0.25, 0.75), (0.5, 0.6))


def test_midpoint_cell_average_second_order():
    # cell average of x^2 versus midpoint value: O(dx^2)
    errs = []
    for n in (8, 16, 32, 64):
        g = build_grid(0.0, 1.0, n)
        xi = g.interfaces()
        exact = (xi[1:] ** 3 - xi[:-1] ** 3) / (3.0 * g.dx)
        mid = g.centers() ** 2
        errs.append(np.abs(exact - mid).max())
    orders = np.log2(np.asarray(errs[:-1]) / np.asarray(errs[1:]))
    assert orders.min() >= 1.9


def test_periodic_ghosts_wrap():
    g = build_grid(0.0, 4.0, 4)
    f = np.array([[1.0], [2.0], [3.0], [4.0]])
    ext = extend_with_ghosts(f, BoundaryPolicy.periodic(), 1, grid=g)
    assert ext[:, 0].tolist() == [4.0, 1.0, 2.0, 3.0, 4.0, 1.0]


def test_transmissive_ghosts_copy_edges():
    g = build_grid(0.0, 4.0, 4)
    f = np.array([[1.0], [2.0], [3.0], [4.0]])
    ext = extend_with_ghosts(f, BoundaryPolicy.transmissive(), 2, grid=g)
    assert ext[:2, 0].tolist() == [1.0, 1.0]
    assert ext[-2:, 0].tolist() == [4.0, 4.0]


def test_dirichlet_masks_components():
    # discharge pinned on the left, thickness copied from the first cell
    g = build_grid(0.0, 3.0, 4)
    f = np.array([[2.0, 0.1], [2.1, 0.2], [2.2, 0.3], [2.3, 0.4]])
    pol = BoundaryPolicy.dirichlet(left={1: 1.0}, right={0: 2.0})
    ext = extend_with_ghosts(f, pol, 1, grid=g)
    assert ext[0].tolist() == [2.0, 1.0]
    assert ext[-1].tolist() == [2.0, 0.4]


def test_stationary_extension_requires_profile():
    g = build_grid(0.0, 4.0, 4)
    f = np.ones((4, 1))
    with pytest.raises(ConfigurationError):
        extend_with_ghosts(f, BoundaryPolicy.stationary(), 1, grid=g)


def test_stationary_extension_uses_profile_values():
    g = build_grid(0.0, 4.0, 4)
    f = np.ones((4, 1))

    def profile(x_anchor, state, offsets):
        return state[None, :] * np.exp(np.asarray(offsets))[:, None]

    ext = extend_with_ghosts(f, BoundaryPolicy.stationary(), 2, grid=g,
                             profile_fn=profile)
    assert ext[1, 0] == pytest.approx(np.exp(-1.0))
    assert ext[0, 0] == pytest.approx(np.exp(-2.0))
    assert ext[-2, 0] == pytest.approx(np.exp(1.0))
    assert ext[-1, 0] == pytest.approx(np.exp(2.0))


def test_ghost_filling_idempotent():
    g = build_grid(0.0, 4.0, 5)
    f = np.linspace(1.0, 2.0, 5)[:, None]
    for pol in (BoundaryPolicy.periodic(), BoundaryPolicy.transmissive(),
                BoundaryPolicy.dirichlet(left={0: 7.0})):
        a = extend_with_ghosts(f, pol, 2, grid=g)
        b = extend_with_ghosts(f, pol, 2, grid=g)
        assert np.array_equal(a, b)


def test_fluctuation_halo_policies():
    g = build_grid(0.0, 4.0, 4)
    uf = np.array([[1.0], [2.0], [3.0], [4.0]])
    per = fluctuation_halo(uf, BoundaryPolicy.periodic(), 1)
    assert per[0, 0] == 4.0 and per[-1, 0] == 1.0
    tra = fluctuation_halo(uf, BoundaryPolicy.transmissive(), 1)
    assert tra[0, 0] == 1.0 and tra[-1, 0] == 4.0
    dir_ = fluctuation_halo(uf, BoundaryPolicy.dirichlet(left={0: 9.0}), 1)
    assert dir_[0, 0] == 0.0
    sta = fluctuation_halo(uf, BoundaryPolicy.stationary(), 2)
    assert np.all(sta[:2] == 0.0) and np.all(sta[-2:] == 0.0)
