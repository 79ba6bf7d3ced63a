"""Rusanov numerical fluxes, full and per splitting part.

The flux is the central average plus a dissipation proportional to a local
wave-speed bound: fixed (|c| for linear transport) or the pairwise maximum of
the spectral radii.  Split variants give each part the bound of its own
sub-system, so explicit-part + implicit-part equals the full Rusanov flux
with viscosity k_expl + k_impl.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .models import EXPLICIT, IMPLICIT, TransportModel


@dataclass(frozen=True)
class ViscosityRule:
    """Dissipation coefficient rule: fixed constant or local wave-speed max."""

    kind: str = "local_max"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "local_max"):
            raise ConfigurationError(f"unknown viscosity rule {self.kind!r}")
        if self.kind == "fixed" and not self.value > 0.0:
            raise ConfigurationError("fixed viscosity must be positive")

    @classmethod
    def fixed(cls, value):
        return cls("fixed", float(value))

    @classmethod
    def local_max(cls):
        return cls("local_max")


def default_viscosity(model):
    if isinstance(model, TransportModel):
        return ViscosityRule.fixed(abs(model.c))
    return ViscosityRule.local_max()


def rusanov(model, u_left, u_right, rule=None):
    """0.5 (f(uL) + f(uR)) - 0.5 k (uR - uL) with k from the rule."""
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    if rule is None:
        rule = default_viscosity(model)
    if rule.kind == "fixed":
        k = rule.value
    else:
        k = np.maximum(model.max_wave_speed(u_left), model.max_wave_speed(u_right))
        k = np.asarray(k)[..., None]
    return 0.5 * (model.flux(u_left) + model.flux(u_right)) - 0.5 * k * (u_right - u_left)


def split_rusanov(model, part, spec, u_left, u_right):
    """Rusanov flux of one splitting part with its own viscosity bound."""
    if part not in (EXPLICIT, IMPLICIT):
        raise ConfigurationError(f"unknown split part {part!r}")
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    fl = spec.flux_part(part, u_left)
    fr = spec.flux_part(part, u_right)
    k = np.maximum(spec.wave_speed_part(part, u_left),
                   spec.wave_speed_part(part, u_right))
    k = np.asarray(k)[..., None]
    return 0.5 * (fl + fr) - 0.5 * k * (u_right - u_left)
