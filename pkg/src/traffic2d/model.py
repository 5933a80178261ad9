"""Two-class flux families, velocities, Jacobian eigenstructure and Riemann invariants.

The model couples two vehicle classes (cars rho, trucks mu) through a
Greenshields-type speed factor that depends on the total occupancy:

    q_class = class_density * c_class * (1 - occupancy)

Three parameterizations are supported:

* shared             occupancy (rho + mu)/r_max, one pair (c_x, c_y) for both classes
* length_weighted    occupancy (rho + 2*mu)/r_max, per-class speed coefficients
                     (trucks count double in the occupancy, same r_max)
* per_class_shared_max   occupancy (rho + mu)/r_max, per-class speed coefficients

Speed coefficients may be negative (convex fluxes); the calibrated lateral
coefficient c_y on highway data is negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# occupancies in (1, 1 + OCC_CLAMP_REL] are treated as roundoff and clamped
OCC_CLAMP_REL = 1e-12


class DomainError(ValueError):
    """State outside the admissible set (negative density, occupancy > r_max)."""


class ParameterError(ValueError):
    """Invalid flux parameters (non-positive r_max, wrong variant, ...)."""


class Axis(Enum):
    X = "x"
    Y = "y"


class Variant(Enum):
    SHARED = "shared"
    LENGTH_WEIGHTED = "length_weighted"
    PER_CLASS_SHARED_MAX = "per_class_shared_max"


@dataclass(frozen=True)
class ClassState:
    """Density pair (rho, mu) at a point or cell."""

    rho: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.mu)):
            raise DomainError(f"non-finite state ({self.rho}, {self.mu})")
        if self.rho < 0.0 or self.mu < 0.0:
            raise DomainError(f"negative density ({self.rho}, {self.mu})")


@dataclass(frozen=True)
class FluxParams:
    """Flux-family coefficients.

    ``truck_weight`` is the occupancy multiplier of mu (2 for the
    length-weighted family, else 1). Use the variant constructors below.
    """

    variant: Variant
    c_x_rho: float
    c_y_rho: float
    c_x_mu: float
    c_y_mu: float
    r_max: float
    truck_weight: float

    def __post_init__(self):
        if self.r_max <= 0.0 or not math.isfinite(self.r_max):
            raise ParameterError(f"r_max must be positive, got {self.r_max}")
        for c in (self.c_x_rho, self.c_y_rho, self.c_x_mu, self.c_y_mu):
            if not math.isfinite(c):
                raise ParameterError("speed coefficients must be finite")

    @classmethod
    def shared(cls, c_x, c_y, r_max):
        return cls(Variant.SHARED, c_x, c_y, c_x, c_y, r_max, 1.0)

    @classmethod
    def length_weighted(cls, c_x_rho, c_y_rho, c_x_mu, c_y_mu, r_max):
        return cls(Variant.LENGTH_WEIGHTED, c_x_rho, c_y_rho, c_x_mu, c_y_mu, r_max, 2.0)

    @classmethod
    def per_class_shared_max(cls, c_x_rho, c_y_rho, c_x_mu, c_y_mu, r_max):
        return cls(Variant.PER_CLASS_SHARED_MAX, c_x_rho, c_y_rho, c_x_mu, c_y_mu, r_max, 1.0)

    def class_speeds(self, axis: Axis):
        """Per-class speed coefficients (c_rho, c_mu) along ``axis``."""
        if axis is Axis.X:
            return self.c_x_rho, self.c_x_mu
        return self.c_y_rho, self.c_y_mu

    def normalized(self):
        """Same family with r_max scaled to 1 (densities must be rescaled by the caller)."""
        return FluxParams(self.variant, self.c_x_rho, self.c_y_rho,
                          self.c_x_mu, self.c_y_mu, 1.0, self.truck_weight)

    def to_dict(self):
        return {
            "variant": self.variant.value,
            "c_x_rho": self.c_x_rho, "c_y_rho": self.c_y_rho,
            "c_x_mu": self.c_x_mu, "c_y_mu": self.c_y_mu,
            "r_max": self.r_max,
        }

    @classmethod
    def from_dict(cls, d):
        variant = Variant(d["variant"])
        args = (d["c_x_rho"], d["c_y_rho"], d["c_x_mu"], d["c_y_mu"], d["r_max"])
        if variant is Variant.SHARED:
            return cls.shared(d["c_x_rho"], d["c_y_rho"], d["r_max"])
        if variant is Variant.LENGTH_WEIGHTED:
            return cls.length_weighted(*args)
        return cls.per_class_shared_max(*args)


@dataclass(frozen=True)
class EigenData:
    """Eigenstructure of C = k1*A + k2*B for the shared family (normalized r_max=1).

    gamma2 is None at mu = 0 (the rho/mu component is a genuine model boundary,
    reported explicitly rather than as an infinity).
    """

    lambda1: float
    lambda2: float
    gamma1: tuple
    gamma2: tuple | None
    field1_type: str = "linearly_degenerate"
    field2_type: str = "genuinely_nonlinear"


def occupancy(rho, mu, params: FluxParams):
    """Effective occupancy (rho + w*mu)/r_max; works on scalars and arrays."""
    return (rho + params.truck_weight * mu) / params.r_max


def _checked_occupancy(rho, mu, params):
    occ = occupancy(rho, mu, params)
    over = np.max(occ) if np.ndim(occ) else occ
    if over > 1.0 + OCC_CLAMP_REL:
        raise DomainError(f"occupancy {over} exceeds r_max={params.r_max}")
    return np.minimum(occ, 1.0)


def flux_arrays(rho, mu, params: FluxParams, axis: Axis):
    """Per-class fluxes along ``axis`` for array-valued densities."""
    occ = _checked_occupancy(rho, mu, params)
    c_rho, c_mu = params.class_speeds(axis)
    factor = 1.0 - occ
    return c_rho * rho * factor, c_mu * mu * factor


def flux(state: ClassState, params: FluxParams, axis: Axis):
    """Per-class flux (q_rho, q_mu) along ``axis``."""
    q_rho, q_mu = flux_arrays(state.rho, state.mu, params, axis)
    return float(q_rho), float(q_mu)


def velocity_arrays(rho, mu, params: FluxParams, axis: Axis):
    occ = _checked_occupancy(rho, mu, params)
    c_rho, c_mu = params.class_speeds(axis)
    factor = 1.0 - occ
    return c_rho * factor, c_mu * factor


def velocity(state: ClassState, params: FluxParams, axis: Axis):
    """Per-class velocity (u_rho, u_mu) = c * (1 - occupancy); u_rho = u_mu for the shared family."""
    u_rho, u_mu = velocity_arrays(state.rho, state.mu, params, axis)
    return float(u_rho), float(u_mu)


def eigen(state: ClassState, params: FluxParams, k1: float, k2: float) -> EigenData:
    """Eigenstructure of the Jacobian pencil k1*Df + k2*Dg, shared family only.

    With s = rho + mu (r_max normalized to 1) and k = k1*c_x + k2*c_y:

        lambda1 = k*(1 - s)     (linearly degenerate)
        lambda2 = k*(1 - 2s)    (genuinely nonlinear)
        gamma1 = (-1, 1),  gamma2 = (rho/mu, 1)

    The eigenvalues coincide iff (rho, mu) = (0, 0) or k1*c_x + k2*c_y = 0.
    """
    if params.variant is not Variant.SHARED:
        raise ParameterError("eigen analysis is defined for the shared family")
    if params.r_max != 1.0:
        raise ParameterError("normalize r_max to 1 before eigen analysis")
    _checked_occupancy(state.rho, state.mu, params)
    s = state.rho + state.mu
    k = k1 * params.c_x_rho + k2 * params.c_y_rho
    lam1 = k * (1.0 - s)
    lam2 = k * (1.0 - 2.0 * s)
    gamma2 = (state.rho / state.mu, 1.0) if state.mu > 0.0 else None
    return EigenData(lam1, lam2, (-1.0, 1.0), gamma2)


def riemann_invariants(state: ClassState):
    """Riemann invariants (z1, z2) = (rho + mu, log(rho/mu)).

    z2 is None when either density vanishes.
    """
    z1 = state.rho + state.mu
    if state.rho <= 0.0 or state.mu <= 0.0:
        return z1, None
    return z1, math.log(state.rho / state.mu)


def jacobian_eigenvalues(rho, mu, params: FluxParams, axis: Axis):
    """Both eigenvalues of the directional Jacobian, vectorized over cells.

    For f = (rho*c_r*(1-s), mu*c_m*(1-s)), s = (rho + w*mu)/r_max, the Jacobian

        [[c_r*(1-s-rho/r),  -c_r*w*rho/r],
         [-c_m*mu/r,        c_m*(1-s-w*mu/r)]]

    has discriminant (a-d)^2 + 4*c_r*c_m*w*(rho/r)*(mu/r), which is
    nonnegative whenever the per-class coefficients share a sign.
    """
    c_r, c_m = params.class_speeds(axis)
    w = params.truck_weight
    r = params.r_max
    rho_hat = np.asarray(rho, dtype=float) / r
    mu_hat = np.asarray(mu, dtype=float) / r
    s = rho_hat + w * mu_hat
    a = c_r * (1.0 - s - rho_hat)
    d = c_m * (1.0 - s - w * mu_hat)
    disc = (a - d) ** 2 + 4.0 * c_r * c_m * w * rho_hat * mu_hat
    if np.min(disc) < -1e-12 * max(1.0, abs(c_r), abs(c_m)) ** 2:
        raise ParameterError("complex eigenvalues: mixed-sign class speeds at this state")
    root = np.sqrt(np.maximum(disc, 0.0))
    half_tr = 0.5 * (a + d)
    return half_tr - 0.5 * root, half_tr + 0.5 * root


def spectral_radius(rho, mu, params: FluxParams, axis: Axis):
    """max(|lambda_1|, |lambda_2|) of the directional Jacobian, vectorized."""
    lo, hi = jacobian_eigenvalues(rho, mu, params, axis)
    return np.maximum(np.abs(lo), np.abs(hi))
