"""Uniform 1D mesh, midpoint quadrature and ghost-cell boundary policies.

Cell fields are plain float arrays of shape ``(n_cells, n_comp)``; ghost
extension returns ``(n_cells + 2*width, n_comp)`` with the interior block in
the middle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

PERIODIC = "periodic"
TRANSMISSIVE = "transmissive"
DIRICHLET = "dirichlet"
STATIONARY_EXTENSION = "stationary_extension"

_SIDE_KINDS = (PERIODIC, TRANSMISSIVE, DIRICHLET, STATIONARY_EXTENSION)


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on [x_left, x_right] with n_cells cells.

    Centers sit at ``x_left + (i + 1/2) dx`` and interfaces at
    ``x_left + i dx``; ``dx`` is always recomputed from the extent so the
    three fields cannot drift apart.
    """

    x_left: float
    x_right: float
    n_cells: int

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    def cell_center(self, i):
        return self.x_left + (i + 0.5) * self.dx

    def interface(self, i):
        return self.x_left + i * self.dx

    def centers(self):
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    def interfaces(self):
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    def extended_centers(self, width):
        """Cell centers including ``width`` ghost cells on each side."""
        idx = np.arange(-width, self.n_cells + width)
        return self.x_left + (idx + 0.5) * self.dx


def build_grid(x_left, x_right, n_cells):
    """Validate and construct a uniform grid (at least 3 cells)."""
    if not x_right > x_left:
        raise ConfigurationError(f"degenerate interval [{x_left}, {x_right}]")
    if n_cells < 3:
        raise ConfigurationError(f"n_cells={n_cells} below minimum stencil width 3")
    return Grid(float(x_left), float(x_right), int(n_cells))


@dataclass(frozen=True)
class Quadrature:
    """Quadrature rule on the reference cell [0, 1].

    Only the midpoint rule is instantiated by the solvers; with the single
    node c=1/2 the cell average and the center value coincide in all
    reconstruction bookkeeping.
    """

    nodes: tuple
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        c = np.asarray(self.nodes, dtype=float)
        if abs(w.sum() - 1.0) > 1e-14:
            raise ConfigurationError("quadrature weights must sum to 1")
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise ConfigurationError("quadrature nodes must lie in [0, 1]")

    @classmethod
    def midpoint(cls):
        return cls((0.5,), (1.0,))

    def cell_nodes(self, grid, i):
        """Physical node positions inside cell i."""
        return grid.interface(i) + np.asarray(self.nodes) * grid.dx


MIDPOINT = Quadrature.midpoint()


@dataclass(frozen=True)
class BoundaryPolicy:
    """Ghost-cell filling policy, one kind per boundary.

    Dirichlet values are given per component index and only those components
    are pinned; the rest are copied from the nearest interior cell.
    """

    left: str
    right: str
    dirichlet_left: dict = field(default_factory=dict)
    dirichlet_right: dict = field(default_factory=dict)

    def __post_init__(self):
        for side in (self.left, self.right):
            if side not in _SIDE_KINDS:
                raise ConfigurationError(f"unknown boundary kind {side!r}")
        if (self.left == PERIODIC) != (self.right == PERIODIC):
            raise ConfigurationError("periodic boundary must apply to both sides")

    @classmethod
    def periodic(cls):
        return cls(PERIODIC, PERIODIC)

    @classmethod
    def transmissive(cls):
        return cls(TRANSMISSIVE, TRANSMISSIVE)

    @classmethod
    def stationary(cls):
        return cls(STATIONARY_EXTENSION, STATIONARY_EXTENSION)

    @classmethod
    def dirichlet(cls, left=None, right=None):
        return cls(
            DIRICHLET if left else TRANSMISSIVE,
            DIRICHLET if right else TRANSMISSIVE,
            dirichlet_left=dict(left or {}),
            dirichlet_right=dict(right or {}),
        )


def _fill_side(ext, policy_kind, values, side, width, n, profile_fn, x_anchor, dx):
    """Fill one halo of ``ext`` in place. ``side`` is -1 (left) or +1 (right)."""
    if policy_kind == PERIODIC:
        if side < 0:
            ext[:width] = ext[width + n - width : width + n]
        else:
            ext[width + n :] = ext[width : width + width]
        return
    edge = ext[width] if side < 0 else ext[width + n - 1]
    if policy_kind == TRANSMISSIVE:
        target = ext[:width] if side < 0 else ext[width + n :]
        target[:] = edge
        return
    if policy_kind == DIRICHLET:
        target = ext[:width] if side < 0 else ext[width + n :]
        target[:] = edge
        for comp, val in values.items():
            target[:, comp] = val
        return
    # stationary extension: march the boundary cell's profile to the ghost centers
    if profile_fn is None:
        raise ConfigurationError("stationary extension requested with no profile available")
    offsets = side * dx * np.arange(1, width + 1)
    ghost_vals = profile_fn(x_anchor, edge, offsets)
    if side < 0:
        ext[:width] = ghost_vals[::-1]
    else:
        ext[width + n :] = ghost_vals


def extend_with_ghosts(values, policy, width, grid=None, profile_fn=None):
    """Return ``values`` padded with ``width`` ghost cells per side.

    ``profile_fn(x_anchor, state, offsets) -> (len(offsets), n_comp)`` is only
    required for the stationary-extension policy; it evaluates the local
    steady solution through ``state`` at ``x_anchor + offsets``.
    """
    if width not in (1, 2):
        raise ConfigurationError(f"ghost width must be 1 or 2, got {width}")
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ConfigurationError("cell field must have shape (n_cells, n_comp)")
    n = values.shape[0]
    ext = np.empty((n + 2 * width, values.shape[1]), dtype=float)
    ext[width : width + n] = values
    needs_grid = STATIONARY_EXTENSION in (policy.left, policy.right)
    if needs_grid and grid is None:
        raise ConfigurationError("stationary extension requires the grid")
    _fill_side(ext, policy.left, policy.dirichlet_left, -1, width, n, profile_fn,
               grid.cell_center(0) if needs_grid else 0.0, grid.dx if needs_grid else 0.0)
    _fill_side(ext, policy.right, policy.dirichlet_right, +1, width, n, profile_fn,
               grid.cell_center(n - 1) if needs_grid else 0.0, grid.dx if needs_grid else 0.0)
    return ext


def fluctuation_halo(uf, policy, width):
    """Halo for the stage fluctuation field.

    Fluctuations wrap for periodic runs, copy for transmissive ones and
    vanish in Dirichlet / stationary-extension ghosts, which keeps
    well-balanced runs exact at the boundaries.
    """
    uf = np.asarray(uf, dtype=float)
    n = uf.shape[0]
    ext = np.zeros((n + 2 * width, uf.shape[1]), dtype=float)
    ext[width : width + n] = uf
    if policy.left == PERIODIC:
        ext[:width] = uf[n - width :]
        ext[width + n :] = uf[:width]
        return ext
    if policy.left == TRANSMISSIVE:
        ext[:width] = uf[0]
    if policy.right == TRANSMISSIVE:
        ext[width + n :] = uf[-1]
    return ext
