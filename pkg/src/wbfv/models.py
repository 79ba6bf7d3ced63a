"""Balance-law models: linear transport, Burgers with a nonlinear source and
shallow water with Manning friction.

Every model exposes the same surface: ``flux``, ``source_geom`` (the factor
multiplying H_x), ``source_plain`` (the H_x-free source), ``max_wave_speed``
and ``stationary_slope`` (the right-hand side of the steady ODE).  States are
arrays of shape ``(..., n_comp)`` and all operations broadcast over leading
dimensions.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, CriticalFlowError, StateError

# identifiers shared with the numba kernels
MODEL_TRANSPORT = 0
MODEL_BURGERS = 1
MODEL_SWE = 2

DEPTH_FLAT = 0
DEPTH_COS_BUMP = 1
DEPTH_GAUSSIAN = 2
DEPTH_EXP_COS = 3

EXPLICIT = "explicit"
IMPLICIT = "implicit"

FULLY_IMPLICIT = "fully_implicit"
SEMI_IMPLICIT_PRESSURE = "semi_implicit_pressure"
SEMI_IMPLICIT_FRICTION = "semi_implicit_friction"

CRIT_REL_TOL = 1e-10


# ---------------------------------------------------------------------------
# depth functions


@dataclass(frozen=True)
class Flat:
    """H(x) = 0."""

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def dH(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def numba_spec(self):
        return DEPTH_FLAT, np.zeros(4)


@dataclass(frozen=True)
class CosBump:
    """Compactly supported cosine bump of given depth, center and width."""

    depth: float = 0.5
    center: float = 1.5
    width: float = 0.4

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s = np.abs(x - self.center) <= self.width / 2
        out = np.zeros_like(x)
        arg = 2.0 * np.pi * (x - self.center) / self.width
        out = np.where(s, -(self.depth / 2.0) * (1.0 + np.cos(arg)), out)
        return out

    def dH(self, x):
        x = np.asarray(x, dtype=float)
        s = np.abs(x - self.center) <= self.width / 2
        arg = 2.0 * np.pi * (x - self.center) / self.width
        return np.where(s, (self.depth * np.pi / self.width) * np.sin(arg), 0.0)

    def numba_spec(self):
        return DEPTH_COS_BUMP, np.array([self.depth, self.center, self.width, 0.0])


@dataclass(frozen=True)
class Gaussian:
    """H(x) = base - amp * exp(-decay (x - center)^2)."""

    base: float = 1.0
    amp: float = 0.5
    decay: float = 1.0
    center: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.base - self.amp * np.exp(-self.decay * (x - self.center) ** 2)

    def dH(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.center
        return 2.0 * self.decay * d * self.amp * np.exp(-self.decay * d * d)

    def numba_spec(self):
        return DEPTH_GAUSSIAN, np.array([self.base, self.amp, self.decay, self.center])


@dataclass(frozen=True)
class ExpCos:
    """Oscillatory bed 1 - (exp(cos(omega x)) - 1/e) / (2 (e - 1/e))."""

    omega: float = 4.0 * np.pi

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scale = 2.0 * (np.e - 1.0 / np.e)
        return 1.0 - (np.exp(np.cos(self.omega * x)) - 1.0 / np.e) / scale

    def dH(self, x):
        x = np.asarray(x, dtype=float)
        scale = 2.0 * (np.e - 1.0 / np.e)
        return self.omega * np.sin(self.omega * x) * np.exp(np.cos(self.omega * x)) / scale

    def numba_spec(self):
        return DEPTH_EXP_COS, np.array([self.omega, 0.0, 0.0, 0.0])


DEPTH_BY_NAME = {"flat": Flat, "cos_bump": CosBump, "gaussian": Gaussian, "exp_cos": ExpCos}


# ---------------------------------------------------------------------------
# models


def _as_state(u, n_comp):
    u = np.asarray(u, dtype=float)
    if u.ndim == 0 and n_comp == 1:
        u = u.reshape(1)
    if u.shape[-1] != n_comp:
        raise StateError(f"state has {u.shape[-1]} components, expected {n_comp}")
    return u


@dataclass(frozen=True)
class TransportModel:
    """u_t + c u_x = alpha u, with H(x) = x."""

    c: float = 1.0
    alpha: float = 1.0

    n_comp = 1
    is_linear = True
    has_exact_profile = True

    def __post_init__(self):
        if self.c == 0.0:
            raise ConfigurationError("transport speed c must be nonzero")

    def flux(self, u):
        return self.c * _as_state(u, 1)

    def source_geom(self, u):
        return self.alpha * _as_state(u, 1)

    def source_plain(self, u):
        return np.zeros_like(_as_state(u, 1))

    def max_wave_speed(self, u):
        u = _as_state(u, 1)
        return np.full(u.shape[:-1], abs(self.c))

    def stationary_slope(self, u, x):
        return (self.alpha / self.c) * _as_state(u, 1)

    def profile_exponent(self):
        return self.alpha / self.c

    def H(self, x):
        return np.asarray(x, dtype=float)

    def Hx(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def numba_spec(self):
        return MODEL_TRANSPORT, np.array([self.c, self.alpha, 0.0]), DEPTH_FLAT, np.zeros(4)


@dataclass(frozen=True)
class BurgersModel:
    """u_t + (u^2/2)_x = alpha u^2, with H(x) = x."""

    alpha: float = 1.0

    n_comp = 1
    is_linear = False
    has_exact_profile = True

    def flux(self, u):
        u = _as_state(u, 1)
        return 0.5 * u * u

    def source_geom(self, u):
        u = _as_state(u, 1)
        return self.alpha * u * u

    def source_plain(self, u):
        return np.zeros_like(_as_state(u, 1))

    def max_wave_speed(self, u):
        return np.abs(_as_state(u, 1))[..., 0]

    def stationary_slope(self, u, x):
        return self.alpha * _as_state(u, 1)

    def profile_exponent(self):
        return self.alpha

    def H(self, x):
        return np.asarray(x, dtype=float)

    def Hx(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def numba_spec(self):
        return MODEL_BURGERS, np.array([self.alpha, 0.0, 0.0]), DEPTH_FLAT, np.zeros(4)


@dataclass(frozen=True)
class ShallowWaterModel:
    """1D shallow water over bathymetry -H(x) with Manning friction.

    State is (h, q): thickness and discharge.  The geometric source is
    (0, g h) H_x and the friction sink is (0, -k q |q| / h^mu).  Dry states
    (h <= 0) are rejected.
    """

    g: float = 9.81
    manning_k: float = 0.0
    mu: float = 7.0 / 3.0
    depth: object = field(default_factory=Flat)

    n_comp = 2
    is_linear = False
    has_exact_profile = False
    positive_component = 0  # thickness must stay positive

    def _check(self, u):
        u = _as_state(u, 2)
        if np.any(u[..., 0] <= 0.0):
            raise StateError("shallow water requires h > 0")
        return u

    def flux(self, u):
        u = self._check(u)
        h, q = u[..., 0], u[..., 1]
        out = np.empty_like(u)
        out[..., 0] = q
        out[..., 1] = q * q / h + 0.5 * self.g * h * h
        return out

    def source_geom(self, u):
        u = self._check(u)
        out = np.zeros_like(u)
        out[..., 1] = self.g * u[..., 0]
        return out

    def source_plain(self, u):
        u = self._check(u)
        out = np.zeros_like(u)
        if self.manning_k != 0.0:
            h, q = u[..., 0], u[..., 1]
            out[..., 1] = -self.manning_k * q * np.abs(q) / h**self.mu
        return out

    def max_wave_speed(self, u):
        u = self._check(u)
        h, q = u[..., 0], u[..., 1]
        return np.abs(q / h) + np.sqrt(self.g * h)

    def celerity(self, u):
        u = self._check(u)
        return np.sqrt(self.g * u[..., 0])

    def velocity(self, u):
        u = self._check(u)
        return u[..., 1] / u[..., 0]

    def froude(self, u):
        return np.abs(self.velocity(u)) / self.celerity(u)

    def stationary_slope(self, u, x):
        u = self._check(u)
        h, q = u[..., 0], u[..., 1]
        vel2 = (q / h) ** 2
        gh = self.g * h
        denom = gh - vel2
        if np.any(np.abs(denom) <= CRIT_REL_TOL * np.maximum(gh, vel2)):
            raise CriticalFlowError("stationary slope at a critical point (gh == u^2)")
        hx = np.asarray(self.depth.dH(x), dtype=float)
        num = gh * hx - self.manning_k * q * np.abs(q) / h**self.mu
        out = np.zeros_like(u)
        out[..., 0] = num / denom
        return out

    def H(self, x):
        return self.depth(x)

    def Hx(self, x):
        return self.depth.dH(x)

    def numba_spec(self):
        dk, dp = self.depth.numba_spec()
        return MODEL_SWE, np.array([self.g, self.manning_k, self.mu]), dk, dp


# module-level aliases matching the operation names

def flux(model, u):
    return model.flux(u)


def source_geom(model, u):
    return model.source_geom(u)


def source_plain(model, u):
    return model.source_plain(u)


def max_wave_speed(model, u):
    return model.max_wave_speed(u)


def stationary_slope(model, u, x):
    return model.stationary_slope(u, x)


def froude(model, u):
    if not isinstance(model, ShallowWaterModel):
        raise ConfigurationError("Froude number is defined for shallow water only")
    return model.froude(u)


# ---------------------------------------------------------------------------
# implicit/explicit splitting


@dataclass(frozen=True)
class SplitSpec:
    """Assignment of flux and source terms to the explicit/implicit parts.

    Regimes:
      fully_implicit          -- explicit part identically zero;
      semi_implicit_pressure  -- frictionless SWE; advection (0, q^2/h)
                                 explicit, (q, g h^2/2) and g h H_x implicit;
      semi_implicit_friction  -- SWE with friction; everything explicit
                                 except the friction sink.

    Each part's Rusanov viscosity is the stated bound of its own sub-system:
    max |q/h| for the advection part, max sqrt(g h) for the pressure part,
    the full wave speed when a part carries the whole flux, zero otherwise.
    """

    model: object
    regime: str

    def flux_part(self, part, u):
        u = np.asarray(u, dtype=float)
        if self.regime == FULLY_IMPLICIT:
            return self.model.flux(u) if part == IMPLICIT else np.zeros_like(u)
        if self.regime == SEMI_IMPLICIT_FRICTION:
            return self.model.flux(u) if part == EXPLICIT else np.zeros_like(u)
        # pressure split
        full = self.model.flux(u)
        h, q = u[..., 0], u[..., 1]
        adv = np.zeros_like(u)
        adv[..., 1] = q * q / h
        return adv if part == EXPLICIT else full - adv

    def source_geom_part(self, part, u):
        u = np.asarray(u, dtype=float)
        if self.regime == SEMI_IMPLICIT_FRICTION:
            return self.model.source_geom(u) if part == EXPLICIT else np.zeros_like(u)
        return self.model.source_geom(u) if part == IMPLICIT else np.zeros_like(u)

    def source_plain_part(self, part, u):
        # the H_x-free source (friction) is implicit in every regime
        u = np.asarray(u, dtype=float)
        return self.model.source_plain(u) if part == IMPLICIT else np.zeros_like(u)

    def wave_speed_part(self, part, u):
        u = np.asarray(u, dtype=float)
        if self.regime == FULLY_IMPLICIT:
            if part == IMPLICIT:
                return self.model.max_wave_speed(u)
            return np.zeros(u.shape[:-1])
        if self.regime == SEMI_IMPLICIT_FRICTION:
            if part == EXPLICIT:
                return self.model.max_wave_speed(u)
            return np.zeros(u.shape[:-1])
        if part == EXPLICIT:
            return np.abs(self.model.velocity(u))
        return self.model.celerity(u)


def split(model, regime):
    """Build the splitting descriptor for a model, validating the pairing."""
    if regime == FULLY_IMPLICIT:
        return SplitSpec(model, regime)
    if not isinstance(model, ShallowWaterModel):
        raise ConfigurationError(f"regime {regime!r} requires the shallow water model")
    if regime == SEMI_IMPLICIT_FRICTION:
        if model.manning_k == 0.0:
            raise ConfigurationError("friction splitting on a frictionless model")
        return SplitSpec(model, regime)
    if regime == SEMI_IMPLICIT_PRESSURE:
        if model.manning_k != 0.0:
            raise ConfigurationError(
                "pressure splitting treats friction explicitly nowhere; use "
                "semi_implicit_friction for k > 0"
            )
        return SplitSpec(model, regime)
    raise ConfigurationError(f"unknown splitting regime {regime!r}")
