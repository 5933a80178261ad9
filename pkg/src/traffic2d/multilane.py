"""Two-lane, two-class comparison model: per-lane 1D LWR systems coupled by
speed-difference lane-change sources.

    lane 1:  rho1_t + q(rho1, mu1)_x = -S,    lane 2:  rho2_t + q(rho2, mu2)_x = +S

with S = C*(max{u2-u1, 0}*rho1 + min{u2-u1, 0}*rho2) per class. Transport uses
a class-wise Godunov scheme with the coupled class's occupancy frozen during
the local Riemann solve; sources are applied by explicit Euler on the
post-flux state. Units are caller-consistent (C has dimension 1/length).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ClassState
from .solver import Outflow, Periodic, StabilityError

NEG_DENSITY_TOL = 1e-12
OCC_ABORT_REL = 1e-10


@dataclass(frozen=True)
class MultilaneParams:
    c_rho: float
    c_mu: float
    r_max: float
    lane_change_rate: float   # C, per unit length

    def __post_init__(self):
        if self.r_max <= 0.0:
            raise ValueError("r_max must be positive")
        if self.lane_change_rate < 0.0:
            raise ValueError("lane-change rate must be nonnegative")

    def to_dict(self):
        return {"c_rho": self.c_rho, "c_mu": self.c_mu, "r_max": self.r_max,
                "lane_change_rate": self.lane_change_rate}


@dataclass
class LaneField:
    """Per-lane cell averages on a uniform 1D grid of length L."""

    L: float
    x0: float
    rho1: np.ndarray
    mu1: np.ndarray
    rho2: np.ndarray
    mu2: np.ndarray

    def __post_init__(self):
        n = len(self.rho1)
        for arr in (self.mu1, self.rho2, self.mu2):
            if len(arr) != n:
                raise ValueError("lane arrays must share a length")
        for arr in (self.rho1, self.mu1, self.rho2, self.mu2):
            if arr.min() < -NEG_DENSITY_TOL:
                raise ValueError("negative lane density")

    @property
    def n(self):
        return len(self.rho1)

    @property
    def dx(self):
        return self.L / self.n

    def xs(self):
        return self.x0 + (np.arange(self.n) + 0.5) * self.dx

    def copy(self):
        return LaneField(self.L, self.x0, self.rho1.copy(), self.mu1.copy(),
                         self.rho2.copy(), self.mu2.copy())

    def masses(self):
        dx = self.dx
        return {"rho1": float(self.rho1.sum() * dx), "mu1": float(self.mu1.sum() * dx),
                "rho2": float(self.rho2.sum() * dx), "mu2": float(self.mu2.sum() * dx)}


def lane_speed(rho, mu, c, rmax):
    """u = c * (1 - (rho + mu)/rmax), evaluated from the lane's own state."""
    return c * (1.0 - (rho + mu) / rmax)


def source_terms(lane1: ClassState, lane2: ClassState, params: MultilaneParams):
    """(S_rho, S_mu) at one location; positive values move mass lane 1 -> lane 2."""
    s_rho, s_mu = _source_arrays(np.asarray(lane1.rho), np.asarray(lane1.mu),
                                 np.asarray(lane2.rho), np.asarray(lane2.mu), params)
    return float(s_rho), float(s_mu)


def _source_arrays(rho1, mu1, rho2, mu2, params):
    c = params.lane_change_rate
    du_rho = (lane_speed(rho2, mu2, params.c_rho, params.r_max)
              - lane_speed(rho1, mu1, params.c_rho, params.r_max))
    du_mu = (lane_speed(rho2, mu2, params.c_mu, params.r_max)
             - lane_speed(rho1, mu1, params.c_mu, params.r_max))
    s_rho = c * (np.maximum(du_rho, 0.0) * rho1 + np.minimum(du_rho, 0.0) * rho2)
    s_mu = c * (np.maximum(du_mu, 0.0) * mu1 + np.minimum(du_mu, 0.0) * mu2)
    return s_rho, s_mu


def godunov_flux_scalar(left, right, c, occ_other, rmax):
    """Exact Godunov flux for v -> v*c*(1 - (v + occ_other)/rmax).

    min over [left, right] when left <= right, max over [right, left]
    otherwise; the single interior critical point v_c = (rmax - occ_other)/2
    joins the endpoints as a candidate. Handles both the concave (c > 0) and
    convex (c < 0) orientation, and degenerates to 0 for c = 0.
    """
    def f(v):
        return v * c * (1.0 - (v + occ_other) / rmax)

    lo, hi = (left, right) if left <= right else (right, left)
    candidates = [f(left), f(right)]
    v_c = 0.5 * (rmax - occ_other)
    if lo <= v_c <= hi:
        candidates.append(f(v_c))
    return min(candidates) if left <= right else max(candidates)


def _godunov_fluxes(v_pad, occ_pad, c, rmax):
    """Vectorized interface fluxes for one class of one lane.

    The coupled class's occupancy is frozen at the interface as the mean of
    the two adjacent cell values (C = 0 and single-class limits are exact).
    """
    occ = 0.5 * (occ_pad[:-1] + occ_pad[1:])
    left = v_pad[:-1]
    right = v_pad[1:]

    def f(v):
        return v * c * (1.0 - (v + occ) / rmax)

    f_left = f(left)
    f_right = f(right)
    v_c = 0.5 * (rmax - occ)
    inside = (np.minimum(left, right) <= v_c) & (v_c <= np.maximum(left, right))
    f_crit = np.where(inside, f(v_c), f_left)
    increasing = left <= right
    flux_min = np.minimum(np.minimum(f_left, f_right), np.where(inside, f_crit, np.inf))
    flux_max = np.maximum(np.maximum(f_left, f_right), np.where(inside, f_crit, -np.inf))
    return np.where(increasing, flux_min, flux_max)


def _pad(arr, bc):
    if isinstance(bc, Periodic):
        return np.concatenate(([arr[-1]], arr, [arr[0]]))
    return np.concatenate(([arr[0]], arr, [arr[-1]]))


def _enforce(rho, mu, rmax, context):
    worst = min(float(rho.min()), float(mu.min()))
    if worst < -NEG_DENSITY_TOL * max(1.0, rmax):
        raise StabilityError(f"{context}: negative density {worst:.3e}")
    np.clip(rho, 0.0, None, out=rho)
    np.clip(mu, 0.0, None, out=mu)
    occ = (rho + mu) / rmax
    top = float(occ.max())
    if top > 1.0 + OCC_ABORT_REL:
        i = int(np.argmax(occ))
        raise StabilityError(f"{context}: occupancy {top * rmax:.6g} > r_max at cell {i}")
    if top > 1.0:
        over = occ > 1.0
        rho[over] /= occ[over]
        mu[over] /= occ[over]


def compute_dt(fields: LaneField, params: MultilaneParams, cfl_safety=0.9,
               remaining=None):
    """1D half-CFL bound plus the source stability bound dt*C*max|du| <= 1."""
    speeds = [0.0]
    for rho, mu in ((fields.rho1, fields.mu1), (fields.rho2, fields.mu2)):
        occ = rho + mu
        for c, v in ((params.c_rho, rho), (params.c_mu, mu)):
            if c != 0.0:
                speeds.append(float(np.abs(c * (1.0 - (occ + v) / params.r_max)).max()))
    wave = max(speeds)
    bound = math.inf if wave == 0.0 else cfl_safety * fields.dx / (2.0 * wave)
    if params.lane_change_rate > 0.0:
        du_rho = np.abs(lane_speed(fields.rho2, fields.mu2, params.c_rho, params.r_max)
                        - lane_speed(fields.rho1, fields.mu1, params.c_rho, params.r_max))
        du_mu = np.abs(lane_speed(fields.rho2, fields.mu2, params.c_mu, params.r_max)
                       - lane_speed(fields.rho1, fields.mu1, params.c_mu, params.r_max))
        du_max = max(float(du_rho.max()), float(du_mu.max()))
        if du_max > 0.0:
            bound = min(bound, cfl_safety / (params.lane_change_rate * du_max))
    if remaining is None:
        return bound
    if bound >= remaining:
        return remaining
    n = max(1, math.ceil(remaining / bound - 1e-9))
    return remaining / n


def step(fields: LaneField, params: MultilaneParams, dt: float, bc=Outflow()) -> LaneField:
    """Godunov transport per lane and class, then the explicit source exchange."""
    dtdx = dt / fields.dx
    new = {}
    for lane, (rho, mu) in (("1", (fields.rho1, fields.mu1)),
                            ("2", (fields.rho2, fields.mu2))):
        rho_pad = _pad(rho, bc)
        mu_pad = _pad(mu, bc)
        f_rho = _godunov_fluxes(rho_pad, mu_pad, params.c_rho, params.r_max)
        f_mu = _godunov_fluxes(mu_pad, rho_pad, params.c_mu, params.r_max)
        rho_new = rho - dtdx * np.diff(f_rho)
        mu_new = mu - dtdx * np.diff(f_mu)
        _enforce(rho_new, mu_new, params.r_max, f"lane {lane} transport")
        new[lane] = (rho_new, mu_new)

    s_rho, s_mu = _source_arrays(new["1"][0], new["1"][1], new["2"][0], new["2"][1], params)
    rho1 = new["1"][0] - dt * s_rho
    mu1 = new["1"][1] - dt * s_mu
    rho2 = new["2"][0] + dt * s_rho
    mu2 = new["2"][1] + dt * s_mu
    _enforce(rho1, mu1, params.r_max, "lane 1 source")
    _enforce(rho2, mu2, params.r_max, "lane 2 source")
    return LaneField(fields.L, fields.x0, rho1, mu1, rho2, mu2)


def simulate(initial: LaneField, params: MultilaneParams, t_final: float,
             cfl_safety=0.9, bc=Outflow(), snapshot_dt=None, on_step=None):
    """March to t_final with per-step dt; returns [(t, LaneField), ...]."""
    if t_final <= 0.0:
        raise ValueError("t_final must be positive")
    targets = []
    if snapshot_dt:
        k = 1
        while k * snapshot_dt < t_final * (1.0 - 1e-12):
            targets.append(k * snapshot_dt)
            k += 1
    targets.append(t_final)
    snapshots = [(0.0, initial.copy())]
    fields = initial
    t = 0.0
    for target in targets:
        while t < target * (1.0 - 1e-14):
            dt = compute_dt(fields, params, cfl_safety, remaining=target - t)
            fields = step(fields, params, dt, bc)
            t += dt
            if on_step is not None:
                on_step(t, dt)
        t = target
        snapshots.append((target, fields.copy()))
    return snapshots
