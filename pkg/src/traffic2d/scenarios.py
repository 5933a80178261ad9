"""Built-in scenario library.

Encodes the named experiment setups so runs and acceptance tests need no
external data: the five normalized Riemann configurations on [-5,5]^2, the
two-lane overtaking run, its multilane counterpart, and a labeled stand-in
for the highway camera segment (vehicle placements frozen here; the original
recording is not redistributable, so that scenario is synthetic by design).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kde
from .calibration import TrajectoryDataset, VehicleTrack
from .model import FluxParams
from .multilane import LaneField, MultilaneParams
from .riemann2d import QuadrantData, ScalarFlux
from .solver import Field2D, Grid2D
from .units import KMH_TO_MS, surface_density

# ---------------------------------------------------------------------------
# Riemann validation scenarios: rho quadrants in {1..4}, mu = rho/2, both
# normalized by rho_max + mu_max = 6; flux coefficients c_x = c_y = -1
# ---------------------------------------------------------------------------

RIEMANN_NORMALIZATION = 6.0
RIEMANN_CASES = {
    "no_shocks": {"rho": (4.0, 2.0, 1.0, 3.0), "expected_case": "no_shocks"},
    "no_rarefactions": {"rho": (1.0, 2.0, 4.0, 3.0), "expected_case": "no_rarefactions",
                        # the A junction as printed alongside the secant-derived value
                        "printed_triple_points": {"A": (0.25, 0.5)}},
    "one_shock": {"rho": (3.0, 2.0, 1.0, 4.0), "expected_case": "one_shock"},
    "one_rarefaction": {"rho": (1.0, 2.0, 3.0, 4.0), "expected_case": "one_rarefaction"},
    "two_shocks_two_rarefactions": {"rho": (3.0, 1.0, 2.0, 4.0),
                                    "expected_case": "two_shocks_two_rarefactions"},
}


@dataclass
class RiemannScenario:
    name: str
    grid: Grid2D
    field: Field2D
    params: FluxParams
    flux: ScalarFlux
    quadrants: QuadrantData
    t_final: float
    printed_triple_points: dict | None


def riemann_scenario(name=None, rho_quadrants=None, n_cells=500,
                     c_x=-1.0, c_y=-1.0) -> RiemannScenario:
    """Quadrant initial data on [-5,5]^2 with dx = dy = 10/n_cells.

    Provide either a case name or four raw rho values; mu0 = rho0/2 and both
    classes are normalized by RIEMANN_NORMALIZATION, giving r = rho + mu in
    [0, 1] for rho values up to 4.
    """
    printed = None
    if name is not None:
        case = RIEMANN_CASES[name]
        rho_quadrants = case["rho"]
        printed = case.get("printed_triple_points")
    elif rho_quadrants is None:
        raise ValueError("need a case name or rho quadrant values")
    name = name or "custom"

    grid = Grid2D(10.0, 10.0, n_cells, n_cells, x0=-5.0, y0=-5.0)
    rho_q = np.asarray(rho_quadrants, float)
    mu_q = rho_q / 2.0
    rho_n = rho_q / RIEMANN_NORMALIZATION
    mu_n = mu_q / RIEMANN_NORMALIZATION

    def quadrant_index(X, Y):
        # Q1=(+,+), Q2=(-,+), Q3=(-,-), Q4=(+,-)
        idx = np.empty(X.shape, dtype=int)
        idx[(X > 0) & (Y > 0)] = 0
        idx[(X <= 0) & (Y > 0)] = 1
        idx[(X <= 0) & (Y <= 0)] = 2
        idx[(X > 0) & (Y <= 0)] = 3
        return idx

    X, Y = np.meshgrid(grid.xs(), grid.ys(), indexing="ij")
    idx = quadrant_index(X, Y)
    field = Field2D(grid, rho_n[idx], mu_n[idx])
    params = FluxParams.shared(c_x, c_y, 1.0)
    flux = ScalarFlux(c_x, c_y)
    v = tuple((rho_n + mu_n).tolist())
    return RiemannScenario(name, grid, field, params, flux, QuadrantData(*v),
                           t_final=1.0, printed_triple_points=printed)


# ---------------------------------------------------------------------------
# overtaking on a two-lane stretch: fast cars, a stationary truck
# ---------------------------------------------------------------------------

VEHICLE_FOOTPRINT_M = 7.5   # length plus safety distance


def _gaussian_bump(X, Y, x0, y0, sx, sy, mass=1.0):
    return mass / (2.0 * math.pi * sx * sy) * np.exp(
        -0.5 * ((X - x0) / sx) ** 2 - 0.5 * ((Y - y0) / sy) ** 2)


@dataclass
class OvertakeScenario:
    grid: Grid2D
    field: Field2D
    params: FluxParams
    t_final: float
    truck_x: float
    metadata: dict


def overtake_scenario() -> OvertakeScenario:
    """Two cars and one immobile truck on 100 m x 6 m, SI units.

    Car speeds (80, -0.4) km/h, truck speeds 0; same jam density for both
    classes. Vehicle blobs are unit-mass Gaussians; the truck sits ahead of
    the slow-lane car, the other car travels on the fast lane.
    """
    lanes = 2
    lx, ly = 100.0, 6.0
    grid = Grid2D(lx, ly, 500, 30)
    r_max = surface_density(lanes / VEHICLE_FOOTPRINT_M * 1000.0, ly)  # veh/m^2
    params = FluxParams.per_class_shared_max(80.0 * KMH_TO_MS, -0.4 * KMH_TO_MS,
                                             0.0, 0.0, r_max)
    placements = {
        "car_fast_lane": (62.0, 4.5),
        "car_slow_lane": (30.0, 1.5),
        "truck": (60.0, 1.5),
    }
    sx_car, sy = 5.0, 1.2
    sx_truck = 7.0
    X, Y = np.meshgrid(grid.xs(), grid.ys(), indexing="ij")
    rho = (_gaussian_bump(X, Y, *placements["car_fast_lane"], sx_car, sy)
           + _gaussian_bump(X, Y, *placements["car_slow_lane"], sx_car, sy))
    mu = _gaussian_bump(X, Y, *placements["truck"], sx_truck, sy)
    field = Field2D(grid, rho, mu)
    meta = {"lanes": lanes, "placements": placements, "units": "m, s, veh/m^2",
            "speeds_kmh": {"c_x_rho": 80.0, "c_y_rho": -0.4, "c_x_mu": 0.0, "c_y_mu": 0.0}}
    return OvertakeScenario(grid, field, params, 4.0, placements["truck"][0], meta)


# ---------------------------------------------------------------------------
# multilane counterpart of the overtaking test
# ---------------------------------------------------------------------------


@dataclass
class MultilaneScenario:
    fields: LaneField
    params: MultilaneParams
    t_final: float
    metadata: dict


def multilane_scenario(lane_change_rate=1.0) -> MultilaneScenario:
    """Two-lane 1D run, 100 m, dx = 0.2 m, T = 4 s, SI units.

    Lane 1 carries one car; lane 2 a car behind a stationary truck. The
    lane-change constant is read per meter: the per-kilometer reading moves
    under 10% of the slow lane's mass over the 4 s horizon and cannot
    reproduce the near-empty lane 2 of the reference runs.
    """
    n = 500
    L = 100.0
    xs = (np.arange(n) + 0.5) * (L / n)
    r_max = 1.0 / VEHICLE_FOOTPRINT_M   # veh/m per lane

    def bump(x0, sigma):
        return np.exp(-0.5 * ((xs - x0) / sigma) ** 2) / (math.sqrt(2.0 * math.pi) * sigma)

    # frozen placements: without lane changing (C = 0) the slow-lane car stays
    # blocked behind the truck past T, with it lane 2 drains almost completely
    fields = LaneField(L, 0.0,
                       rho1=bump(75.0, 5.0), mu1=np.zeros(n),
                       rho2=bump(45.0, 5.0), mu2=bump(70.0, 4.0))
    params = MultilaneParams(c_rho=80.0 * KMH_TO_MS, c_mu=0.0, r_max=r_max,
                             lane_change_rate=lane_change_rate)
    meta = {"placements": {"car_lane1": 75.0, "car_lane2": 45.0, "truck_lane2": 70.0},
            "units": "m, s, veh/m", "lane_change_rate_per_m": lane_change_rate}
    return MultilaneScenario(fields, params, 4.0, meta)


# ---------------------------------------------------------------------------
# synthetic stand-in for the camera segment (three cars, one truck)
# ---------------------------------------------------------------------------


@dataclass
class CameraStandinScenario:
    grid: Grid2D
    dataset: TrajectoryDataset
    params: FluxParams
    kernel: kde.KernelConfig
    rmax_surface: float
    metadata: dict


def camera_standin_scenario() -> CameraStandinScenario:
    """450 m x 14 m three-lane segment with synthetic linear trajectories.

    Placements and speeds are frozen stand-ins (the original recording is
    external); the scenario exercises the KDE-initialized comparison
    pipeline end to end and is labeled as a stand-in in run manifests.
    """
    lx, ly = 450.0, 14.0
    grid = Grid2D(lx, ly, 225, 28)  # dx = 2 m, dy = 0.5 m
    lanes = 3
    rmax_km = lanes / VEHICLE_FOOTPRINT_M * 1000.0
    params = FluxParams.shared(97.04 * KMH_TO_MS, -0.41 * KMH_TO_MS,
                               surface_density(rmax_km, ly))
    vehicles = []
    # (id, class, x at t=0 [m], lane-center y [m], vx [m/s], vy [m/s])
    # slopes sit near the model speed at the blobs' occupancy so the
    # advected and extrapolated fields stay comparable over the horizon
    for vid, vclass, x0, y0, vx, vy in (
            ("car1", "car", 60.0, 3.0, 22.5, -0.05),
            ("car2", "car", 140.0, 7.0, 23.0, 0.0),
            ("car3", "car", 230.0, 11.0, 23.5, -0.1),
            ("truck1", "truck", 110.0, 3.0, 21.5, 0.0)):
        t = np.arange(0.0, 10.2, 0.2)
        vehicles.append(VehicleTrack(vid, vclass, t, x0 + vx * t, y0 + vy * t))
    dataset = TrajectoryDataset(vehicles)
    kernel = kde.default_bandwidths(lx, ly)
    meta = {"standin": True,
            "note": "synthetic placements; external camera data not redistributable",
            "lanes": lanes, "lane_centers_m": [3.0, 7.0, 11.0]}
    return CameraStandinScenario(grid, dataset, params, kernel,
                                 surface_density(rmax_km, ly), meta)
