"""Continuum densities from point positions (Parzen-Rosenblatt window).

Each vehicle contributes a separable bivariate Gaussian

    K(x, y) = exp(-x^2/(2 hx^2) - y^2/(2 hy^2)) / (2 pi hx hy)

so a KDE field integrates to the vehicle count (up to boundary truncation,
which is reported as a diagnostic, never renormalized away). Fields are in
veh/m^2 when positions and bandwidths are in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .solver import Grid2D


@dataclass(frozen=True)
class KernelConfig:
    hx: float
    hy: float

    def __post_init__(self):
        if self.hx <= 0.0 or self.hy <= 0.0:
            raise ValueError("bandwidths must be positive")


def default_bandwidths(lx: float, ly: float) -> KernelConfig:
    """Road-size rule (hx, hy) = (Lx/20, Ly/20)."""
    if lx <= 0.0 or ly <= 0.0:
        raise ValueError("domain lengths must be positive")
    return KernelConfig(lx / 20.0, ly / 20.0)


def reconstruct_density(positions_x, positions_y, grid: Grid2D, cfg: KernelConfig):
    """Sum of Gaussian kernels evaluated at the cell centers; one class per call.

    Empty position lists give a zero field. Separable kernels make the sum a
    rank-N outer product accumulated with one matrix multiply.
    """
    xv = np.atleast_1d(np.asarray(positions_x, float))
    yv = np.atleast_1d(np.asarray(positions_y, float))
    if xv.shape != yv.shape:
        raise ValueError("position coordinate arrays must match")
    field = np.zeros((grid.Nx, grid.Ny))
    if xv.size == 0:
        return field
    xs = grid.xs()[:, None]
    ys = grid.ys()[:, None]
    gx = np.exp(-0.5 * ((xs - xv[None, :]) / cfg.hx) ** 2) / (math.sqrt(2.0 * math.pi) * cfg.hx)
    gy = np.exp(-0.5 * ((ys - yv[None, :]) / cfg.hy) ** 2) / (math.sqrt(2.0 * math.pi) * cfg.hy)
    return gx @ gy.T


def field_mass(field, grid: Grid2D) -> float:
    """Integral of the field over the grid; compare with N(t) to see truncation loss."""
    return float(np.sum(field) * grid.cell_area())


@dataclass(frozen=True)
class LinearTrack:
    """x(t) = a_x + b_x t, y(t) = a_y + b_y t, valid for extrapolation too."""

    vehicle_id: str
    vclass: str
    a_x: float
    b_x: float
    a_y: float
    b_y: float
    t0: float
    t1: float

    def __post_init__(self):
        for c in (self.a_x, self.b_x, self.a_y, self.b_y):
            if not math.isfinite(c):
                raise ValueError("non-finite track coefficients")

    def position(self, t):
        return self.a_x + self.b_x * t, self.a_y + self.b_y * t


def fit_linear_tracks(dataset) -> dict:
    """Per-vehicle affine least-squares fits, keyed by vehicle id.

    Evaluating a track outside its recorded interval extrapolates the same
    line, which is how vehicles keep a position after leaving the
    supervised area.
    """
    tracks = {}
    for v in dataset.vehicles:
        if len(v.t) < 2 or np.ptp(v.t) == 0.0:
            raise ValueError(f"vehicle {v.vehicle_id}: need samples at distinct times")
        b_x, a_x = np.polyfit(v.t, v.x, 1)
        b_y, a_y = np.polyfit(v.t, v.y, 1)
        tracks[v.vehicle_id] = LinearTrack(v.vehicle_id, v.vclass,
                                           float(a_x), float(b_x), float(a_y), float(b_y),
                                           float(v.t[0]), float(v.t[-1]))
    return tracks


def positions_at(tracks: dict, t: float, vclass: str | None = None):
    """(x, y) arrays of all tracks (optionally one class) at time t."""
    sel = [tr for tr in tracks.values() if vclass is None or tr.vclass == vclass]
    xs = np.array([tr.position(t)[0] for tr in sel])
    ys = np.array([tr.position(t)[1] for tr in sel])
    return xs, ys


def l1_error(reference, computed, grid: Grid2D) -> float:
    """Discrete L1 distance: sum |ref - comp| * dx * dy."""
    reference = np.asarray(reference)
    computed = np.asarray(computed)
    if reference.shape != computed.shape or reference.shape != (grid.Nx, grid.Ny):
        raise ValueError("field shapes must match the grid")
    return float(np.sum(np.abs(reference - computed)) * grid.cell_area())


def normalized_l1_error(reference, computed, grid: Grid2D, rmax_surface: float) -> float:
    """L1 error of the fields scaled by the surface jam density.

    This is the normalization used for simulation-vs-data comparisons.
    """
    return l1_error(np.asarray(reference) / rmax_surface,
                    np.asarray(computed) / rmax_surface, grid)
