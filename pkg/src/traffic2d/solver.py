"""Strang-split finite-volume integrator for the 2D two-class system.

Each step applies a half x-sweep, a full y-sweep and a second half x-sweep of
the conservative local Lax-Friedrichs (Rusanov) update; the time step obeys

    dt/dx <= 0.5 / max(|eigenvalues of both directional Jacobians|)

scaled by a safety factor and recomputed every step from the current field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import kernels, model
from .model import Axis, ClassState, FluxParams

# intermediate occupancies above r_max*(1+OCC_ABORT_REL) abort the run;
# smaller excursions are roundoff and are clamped back to the boundary
OCC_ABORT_REL = 1e-10
NEG_DENSITY_TOL = 1e-12


class StabilityError(RuntimeError):
    """A sweep produced a state outside the admissible set beyond clamp tolerance."""


@dataclass(frozen=True)
class Grid2D:
    """Uniform cell-centered grid on [x0, x0+Lx] x [y0, y0+Ly]."""

    Lx: float
    Ly: float
    Nx: int
    Ny: int
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.Nx < 3 or self.Ny < 3:
            raise ValueError("grids need at least 3 cells per direction")
        if self.Lx <= 0.0 or self.Ly <= 0.0:
            raise ValueError("domain lengths must be positive")

    @property
    def dx(self):
        return self.Lx / self.Nx

    @property
    def dy(self):
        return self.Ly / self.Ny

    def xs(self):
        return self.x0 + (np.arange(self.Nx) + 0.5) * self.dx

    def ys(self):
        return self.y0 + (np.arange(self.Ny) + 0.5) * self.dy

    def cell_area(self):
        return self.dx * self.dy

    def to_dict(self):
        return {"Lx": self.Lx, "Ly": self.Ly, "Nx": self.Nx, "Ny": self.Ny,
                "x0": self.x0, "y0": self.y0}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class Field2D:
    """Cell-centered (rho, mu) arrays of shape (Nx, Ny)."""

    grid: Grid2D
    rho: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        expected = (self.grid.Nx, self.grid.Ny)
        self.rho = np.ascontiguousarray(self.rho, dtype=float)
        self.mu = np.ascontiguousarray(self.mu, dtype=float)
        if self.rho.shape != expected or self.mu.shape != expected:
            raise ValueError(f"field shape mismatch: expected {expected}")
        if not (np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.mu))):
            raise ValueError("non-finite field values")
        if self.rho.min() < -NEG_DENSITY_TOL or self.mu.min() < -NEG_DENSITY_TOL:
            raise ValueError("negative densities in field")

    @classmethod
    def constant(cls, grid, state: ClassState):
        shape = (grid.Nx, grid.Ny)
        return cls(grid, np.full(shape, state.rho), np.full(shape, state.mu))

    @classmethod
    def from_function(cls, grid, fn):
        """Build from fn(x, y) -> (rho, mu) evaluated on the cell-center meshgrid."""
        X, Y = np.meshgrid(grid.xs(), grid.ys(), indexing="ij")
        rho, mu = fn(X, Y)
        return cls(grid, np.broadcast_to(rho, X.shape).copy(),
                   np.broadcast_to(mu, X.shape).copy())

    def copy(self):
        return Field2D(self.grid, self.rho.copy(), self.mu.copy())

    def total_mass(self):
        """(rho mass, mu mass) integrated over the domain."""
        area = self.grid.cell_area()
        return float(self.rho.sum() * area), float(self.mu.sum() * area)

    def center_of_mass(self, component="rho"):
        """(x, y) centroid of one class; None for a massless class."""
        dens = self.rho if component == "rho" else self.mu
        total = dens.sum()
        if total <= 0.0:
            return None
        xs, ys = self.grid.xs(), self.grid.ys()
        cx = float((dens.sum(axis=1) * xs).sum() / total)
        cy = float((dens.sum(axis=0) * ys).sum() / total)
        return cx, cy


@dataclass(frozen=True)
class Outflow:
    """Zero-gradient ghost cells."""


@dataclass(frozen=True)
class Periodic:
    """Wrap-around ghost cells."""


@dataclass(frozen=True)
class Dirichlet:
    """Fixed ghost states per side."""

    left: ClassState
    right: ClassState
    bottom: ClassState
    top: ClassState


@dataclass(frozen=True)
class SolverConfig:
    t_final: float
    cfl_safety: float = 0.9
    bc: object = dataclass_field(default_factory=Outflow)
    snapshot_dt: float | None = None
    strang_form: str = "standard"   # "printed" reproduces the literal final-sweep update

    def __post_init__(self):
        if self.t_final <= 0.0:
            raise ValueError("t_final must be positive")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError("cfl_safety must be in (0, 1]")
        if self.strang_form not in ("standard", "printed"):
            raise ValueError(f"unknown strang_form {self.strang_form!r}")


def max_wave_speed(field: Field2D, params: FluxParams) -> float:
    """Maximum Jacobian spectral radius over all cells and both directions."""
    if field.rho.size == 0:
        raise ValueError("empty field")
    speed = 0.0
    for axis in (Axis.X, Axis.Y):
        speed = max(speed, float(model.spectral_radius(field.rho, field.mu, params, axis).max()))
    return speed


def compute_dt(grid: Grid2D, speed: float, cfl_safety: float,
               remaining: float | None = None, cadence: float | None = None) -> float:
    """CFL time step, capped so an integer number of steps lands exactly on the target.

    With speed = 0 the field is static and dt falls back to the cadence /
    remaining-time bound.
    """
    if speed < 0.0:
        raise ValueError("speed must be nonnegative")
    if not (0.0 < cfl_safety <= 1.0):
        raise ValueError("cfl_safety must be in (0, 1]")
    bound = math.inf if speed == 0.0 else cfl_safety * min(grid.dx, grid.dy) / (2.0 * speed)
    if cadence is not None:
        bound = min(bound, cadence)
    if remaining is None:
        return bound
    if bound >= remaining:
        return remaining
    n = max(1, math.ceil(remaining / bound - 1e-9))
    return remaining / n


def rusanov_flux(left: ClassState, right: ClassState, params: FluxParams, axis: Axis):
    """Interface flux F = 0.5*(f(R) + f(L) - alpha*(R - L)) componentwise.

    alpha is the larger of the two endpoint Jacobian spectral radii; for these
    quadratic fluxes the eigenvalues are monotone in the occupancy, so the
    maximum over the connecting segment is attained at an endpoint.
    """
    f_l = model.flux(left, params, axis)
    f_r = model.flux(right, params, axis)
    alpha = max(float(model.spectral_radius(left.rho, left.mu, params, axis)),
                float(model.spectral_radius(right.rho, right.mu, params, axis)))
    f_rho = 0.5 * (f_r[0] + f_l[0] - alpha * (right.rho - left.rho))
    f_mu = 0.5 * (f_r[1] + f_l[1] - alpha * (right.mu - left.mu))
    return f_rho, f_mu


def _padded(arr, bc, axis, lo_value, hi_value):
    """Ghost-padded copy with the sweep direction moved to axis 0 (C order)."""
    a = arr if axis == 0 else arr.T
    n, m = a.shape
    out = np.empty((n + 2, m), dtype=float)
    out[1:-1] = a
    if isinstance(bc, Periodic):
        out[0] = a[-1]
        out[-1] = a[0]
    elif isinstance(bc, Dirichlet):
        out[0] = lo_value
        out[-1] = hi_value
    else:
        out[0] = a[0]
        out[-1] = a[-1]
    return out


def _enforce_admissible(rho, mu, params, context):
    """Clamp roundoff-level excursions; abort on genuine instability."""
    scale = max(1.0, params.r_max)
    worst = min(float(rho.min()), float(mu.min()))
    if worst < -NEG_DENSITY_TOL * scale:
        which = rho if float(rho.min()) <= float(mu.min()) else mu
        i, j = np.unravel_index(int(np.argmin(which)), which.shape)
        raise StabilityError(f"{context}: negative density {worst:.3e} at cell ({i}, {j})")
    np.clip(rho, 0.0, None, out=rho)
    np.clip(mu, 0.0, None, out=mu)
    occ = model.occupancy(rho, mu, params)
    top = float(occ.max())
    if top > 1.0 + OCC_ABORT_REL:
        i, j = np.unravel_index(int(np.argmax(occ)), occ.shape)
        raise StabilityError(f"{context}: occupancy {top * params.r_max:.6g} exceeds "
                             f"r_max={params.r_max} at cell ({i}, {j})")
    if top > 1.0:
        over = occ > 1.0
        factor = 1.0 / occ[over]
        rho[over] *= factor
        mu[over] *= factor
    return rho, mu


def _sweep(rho, mu, params, axis: Axis, lam, bc, context):
    c_rho, c_mu = params.class_speeds(axis)
    if axis is Axis.X:
        bc_lo = getattr(bc, "left", None)
        bc_hi = getattr(bc, "right", None)
        np_axis = 0
    else:
        bc_lo = getattr(bc, "bottom", None)
        bc_hi = getattr(bc, "top", None)
        np_axis = 1
    lo_r = bc_lo.rho if bc_lo is not None else 0.0
    hi_r = bc_hi.rho if bc_hi is not None else 0.0
    lo_m = bc_lo.mu if bc_lo is not None else 0.0
    hi_m = bc_hi.mu if bc_hi is not None else 0.0
    rho_pad = _padded(rho, bc, np_axis, lo_r, hi_r)
    mu_pad = _padded(mu, bc, np_axis, lo_m, hi_m)
    rho_new, mu_new = kernels.rusanov_sweep(rho_pad, mu_pad, c_rho, c_mu,
                                            params.truck_weight, params.r_max, lam)
    if axis is Axis.Y:
        rho_new = np.ascontiguousarray(rho_new.T)
        mu_new = np.ascontiguousarray(mu_new.T)
    else:
        rho_new = np.asarray(rho_new)
        mu_new = np.asarray(mu_new)
    return _enforce_admissible(rho_new, mu_new, params, context)


def strang_step(field: Field2D, params: FluxParams, dt: float, bc,
                form: str = "standard") -> Field2D:
    """One Strang step: half x-sweep, full y-sweep, half x-sweep.

    ``form="printed"`` applies the final half-sweep flux difference to the
    pre-step state instead of the y-swept one; it exists only so the
    replication harness can compare the two readings, and it is not
    consistent with the 2D dynamics.
    """
    grid = field.grid
    lam_x = 0.5 * dt / grid.dx
    lam_y = dt / grid.dy
    rho, mu = _sweep(field.rho, field.mu, params, Axis.X, lam_x, bc, "x half-sweep 1")
    rho, mu = _sweep(rho, mu, params, Axis.Y, lam_y, bc, "y sweep")
    rho3, mu3 = _sweep(rho, mu, params, Axis.X, lam_x, bc, "x half-sweep 2")
    if form == "printed":
        rho3 = field.rho + (rho3 - rho)
        mu3 = field.mu + (mu3 - mu)
        _enforce_admissible(rho3, mu3, params, "x half-sweep 2 (printed form)")
    return Field2D(grid, rho3, mu3)


def simulate(initial: Field2D, params: FluxParams, config: SolverConfig,
             on_step=None):
    """Run to t = t_final, recomputing dt from the current field every step.

    Returns [(t, Field2D), ...] including t=0 and t=t_final; intermediate
    snapshots land exactly on multiples of ``snapshot_dt``.
    """
    grid = initial.grid
    _enforce_admissible(initial.rho.copy(), initial.mu.copy(), params, "initial data")
    t_final = config.t_final
    targets = []
    if config.snapshot_dt:
        k = 1
        while k * config.snapshot_dt < t_final * (1.0 - 1e-12):
            targets.append(k * config.snapshot_dt)
            k += 1
    targets.append(t_final)

    snapshots = [(0.0, initial.copy())]
    field = initial
    t = 0.0
    for target in targets:
        while t < target * (1.0 - 1e-14) or (target == 0.0 and t < target):
            speed = max_wave_speed(field, params)
            dt = compute_dt(grid, speed, config.cfl_safety, remaining=target - t)
            field = strang_step(field, params, dt, config.bc, config.strang_form)
            t += dt
            if on_step is not None:
                on_step(t, dt)
        t = target
        snapshots.append((target, field.copy()))
    return snapshots
