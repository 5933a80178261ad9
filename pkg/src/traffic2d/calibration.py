"""Trajectory data to macroscopic series to fitted flux coefficients.

Pipeline: per-vehicle constant speeds (least-squares slopes), per-time-bin
counts/densities/speeds/fluxes, aggregation over kappa-bin windows, and
bounded scalar least-squares fits of the flux-family coefficients. Each
coefficient's objective is quadratic, so the fits are cross-checkable against
the closed-form weighted least-squares ratio.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field as dataclass_field, replace

import numpy as np

from .jsonio import json_default
from .optimize import golden_section
from .units import MS_TO_KMH, veh_per_m_to_veh_per_km

VEHICLE_CLASSES = ("car", "truck")

DEFAULT_BOUNDS = {
    "c_x": (0.0, 200.0),
    "c_y": (-10.0, 10.0),
}


class IngestionError(ValueError):
    """Malformed trajectory input."""


class FlatObjectiveError(RuntimeError):
    """Fit objective carries no information (degenerate series)."""


@dataclass(frozen=True)
class VehicleTrack:
    vehicle_id: str
    vclass: str
    t: np.ndarray   # s
    x: np.ndarray   # m
    y: np.ndarray   # m

    def __post_init__(self):
        if self.vclass not in VEHICLE_CLASSES:
            raise IngestionError(f"unknown vehicle class {self.vclass!r}")
        for arr in (self.t, self.x, self.y):
            if not np.all(np.isfinite(arr)):
                raise IngestionError(f"non-finite sample for vehicle {self.vehicle_id}")
        if np.any(np.diff(self.t) < 0.0):
            raise IngestionError(f"timestamps not sorted for vehicle {self.vehicle_id}")


@dataclass
class TrajectoryDataset:
    vehicles: list

    def __post_init__(self):
        if not self.vehicles:
            raise IngestionError("empty trajectory dataset")

    def by_class(self, vclass):
        return [v for v in self.vehicles if v.vclass == vclass]


def load_trajectories_csv(path) -> TrajectoryDataset:
    """Read the `vehicle_id,class,t_s,x_m,y_m` trajectory format."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"vehicle_id", "class", "t_s", "x_m", "y_m"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise IngestionError(f"bad header {reader.fieldnames}, expected {sorted(expected)}")
        for line in reader:
            key = line["vehicle_id"]
            rows.setdefault(key, {"class": line["class"], "t": [], "x": [], "y": []})
            entry = rows[key]
            if entry["class"] != line["class"]:
                raise IngestionError(f"vehicle {key} changes class mid-file")
            entry["t"].append(float(line["t_s"]))
            entry["x"].append(float(line["x_m"]))
            entry["y"].append(float(line["y_m"]))
    vehicles = []
    for vid, entry in rows.items():
        order = np.argsort(np.asarray(entry["t"]), kind="stable")
        vehicles.append(VehicleTrack(vid, entry["class"],
                                     np.asarray(entry["t"], float)[order],
                                     np.asarray(entry["x"], float)[order],
                                     np.asarray(entry["y"], float)[order]))
    return TrajectoryDataset(vehicles)


# extra ingestion formats (e.g. external highway datasets) register here
# without touching the pipeline
INGESTORS = {"csv": load_trajectories_csv}


def register_ingestor(name, fn):
    INGESTORS[name] = fn


def load_trajectories(path, fmt="csv") -> TrajectoryDataset:
    try:
        ingest = INGESTORS[fmt]
    except KeyError:
        raise IngestionError(f"no ingestor registered for format {fmt!r}") from None
    return ingest(path)


def constant_speed_fit(track: VehicleTrack):
    """Least-squares slopes (vx, vy) in m/s of the vehicle's x(t), y(t)."""
    if len(track.t) < 2 or np.ptp(track.t) == 0.0:
        raise ValueError(f"vehicle {track.vehicle_id}: need samples at distinct times")
    vx = np.polyfit(track.t, track.x, 1)[0]
    vy = np.polyfit(track.t, track.y, 1)[0]
    return float(vx), float(vy)


@dataclass
class MacroSeries:
    """Per-bin macroscopic quantities; NaN marks bins where a class is absent.

    Densities in veh/km, speeds in km/h, fluxes in veh/h. Fluxes are computed
    before any aggregation (mean of products, not product of means).
    """

    variant: str                 # "shared" | "per_class"
    dt: float                    # bin width, s
    kappa: int
    t: np.ndarray                # bin centers, s
    rho: np.ndarray
    mu: np.ndarray
    ux_rho: np.ndarray
    uy_rho: np.ndarray
    ux_mu: np.ndarray
    uy_mu: np.ndarray
    ux: np.ndarray               # shared-family speed: car mean + truck mean
    uy: np.ndarray
    qx_rho: np.ndarray
    qy_rho: np.ndarray
    qx_mu: np.ndarray
    qy_mu: np.ndarray

    def __len__(self):
        return len(self.t)


def macro_extract(dataset: TrajectoryDataset, lx_m: float, dt_s: float,
                  variant: str = "shared") -> MacroSeries:
    """Counts, densities, class speeds and fluxes on a uniform time binning.

    A vehicle is present in bin k when it has a sample in [k*dt, (k+1)*dt).
    Present-vehicle speeds are the per-vehicle constant slopes; the shared
    family uses the sum of the two class means while the per-class family
    keeps them separate. Bins missing a class get NaN speeds and are skipped
    by the fits.
    """
    if variant not in ("shared", "per_class"):
        raise ValueError(f"unknown variant {variant!r}")
    if dt_s <= 0.0:
        raise ValueError("dt must be positive")
    t_end = max(float(v.t[-1]) for v in dataset.vehicles)
    n_bins = max(1, int(math.floor(t_end / dt_s)) + 1)

    slopes = {v.vehicle_id: constant_speed_fit(v) for v in dataset.vehicles}
    members = {("car", k): [] for k in range(n_bins)}
    members.update({("truck", k): [] for k in range(n_bins)})
    for v in dataset.vehicles:
        bins = np.unique(np.floor(v.t / dt_s).astype(int))
        for k in bins:
            if 0 <= k < n_bins:
                members[(v.vclass, int(k))].append(v.vehicle_id)

    lx_km = lx_m / 1000.0
    shape = (n_bins,)
    rho = np.zeros(shape)
    mu = np.zeros(shape)
    speeds = {name: np.full(shape, np.nan) for name in
              ("ux_rho", "uy_rho", "ux_mu", "uy_mu")}
    for k in range(n_bins):
        cars = members[("car", k)]
        trucks = members[("truck", k)]
        rho[k] = len(cars) / lx_km
        mu[k] = len(trucks) / lx_km
        if cars:
            vx = [slopes[i][0] for i in cars]
            vy = [slopes[i][1] for i in cars]
            speeds["ux_rho"][k] = np.mean(vx) * MS_TO_KMH
            speeds["uy_rho"][k] = np.mean(vy) * MS_TO_KMH
        if trucks:
            wx = [slopes[i][0] for i in trucks]
            wy = [slopes[i][1] for i in trucks]
            speeds["ux_mu"][k] = np.mean(wx) * MS_TO_KMH
            speeds["uy_mu"][k] = np.mean(wy) * MS_TO_KMH

    ux = speeds["ux_rho"] + speeds["ux_mu"]
    uy = speeds["uy_rho"] + speeds["uy_mu"]
    if variant == "shared":
        qx_rho, qy_rho = rho * ux, rho * uy
        qx_mu, qy_mu = mu * ux, mu * uy
    else:
        qx_rho, qy_rho = rho * speeds["ux_rho"], rho * speeds["uy_rho"]
        qx_mu, qy_mu = mu * speeds["ux_mu"], mu * speeds["uy_mu"]

    t_centers = (np.arange(n_bins) + 0.5) * dt_s
    return MacroSeries(variant, dt_s, 1, t_centers, rho, mu,
                       speeds["ux_rho"], speeds["uy_rho"],
                       speeds["ux_mu"], speeds["uy_mu"],
                       ux, uy, qx_rho, qy_rho, qx_mu, qy_mu)


def _window_mean(arr, kappa):
    out = []
    for start in range(0, len(arr), kappa):
        chunk = arr[start:start + kappa]
        good = np.isfinite(chunk)
        out.append(chunk[good].mean() if good.any() else np.nan)
    return np.asarray(out)


def aggregate(series: MacroSeries, kappa: int) -> MacroSeries:
    """Average non-overlapping windows of ``kappa`` bins (defined entries only).

    The trailing partial window is averaged over its actual length.
    """
    if kappa < 1 or int(kappa) != kappa:
        raise ValueError("kappa must be a positive integer")
    kappa = int(kappa)
    if kappa == 1:
        return replace(series)
    fields = {}
    for name in ("t", "rho", "mu", "ux_rho", "uy_rho", "ux_mu", "uy_mu",
                 "ux", "uy", "qx_rho", "qy_rho", "qx_mu", "qy_mu"):
        fields[name] = _window_mean(getattr(series, name), kappa)
    return MacroSeries(series.variant, series.dt, series.kappa * kappa, **fields)


def rmax_from_geometry(lanes: int, effective_length_m: float) -> float:
    """Jam density in veh/km: lanes / (vehicle length + safety distance)."""
    if lanes < 1 or int(lanes) != lanes:
        raise ValueError("lanes must be a positive integer")
    if effective_length_m <= 0.0:
        raise ValueError("effective length must be positive")
    return veh_per_m_to_veh_per_km(lanes / effective_length_m)


@dataclass
class FitResult:
    variant: str
    coefficients: dict
    residual_l2: float
    iterations: dict
    bounds: dict
    identifiable: dict = dataclass_field(default_factory=dict)

    def to_dict(self):
        return {"variant": self.variant, "coefficients": self.coefficients,
                "residual_l2": self.residual_l2, "iterations": self.iterations,
                "bounds": self.bounds, "identifiable": self.identifiable}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), indent=2, default=json_default, **kwargs)


def _scalar_fit(name, data_terms, bounds, tol=1e-8):
    """Minimize sum over terms of ||q_data - c * basis||^2 for one coefficient.

    Each term is a (q_data, basis) array pair; NaN entries are dropped. The
    objective is quadratic in c; a flat objective (no usable support) is an
    error for required coefficients and an "unidentifiable" flag otherwise.
    """
    qs, bs = [], []
    for q_data, basis in data_terms:
        good = np.isfinite(q_data) & np.isfinite(basis)
        qs.append(q_data[good])
        bs.append(basis[good])
    q = np.concatenate(qs)
    b = np.concatenate(bs)
    if len(q) == 0 or not np.any(np.abs(b) > 0.0):
        return None

    def objective(c):
        return float(np.sum((q - c * b) ** 2))

    x, fx, iters = golden_section(objective, bounds[0], bounds[1], tol=tol)
    return x, fx, iters


def fit_shared(series: MacroSeries, rmax: float, bounds: dict | None = None) -> FitResult:
    """Fit (c_x, c_y) of the shared family: two independent bounded 1D problems.

    c_x minimizes sum_k [(qx_rho - rho*c*phi)^2 + (qx_mu - mu*c*phi)^2] with
    phi = 1 - (rho + mu)/rmax, and analogously c_y.
    """
    if np.count_nonzero(np.isfinite(series.qx_rho)) < 2:
        raise FlatObjectiveError("need at least 2 usable bins")
    bounds = {**DEFAULT_BOUNDS, **(bounds or {})}
    phi = 1.0 - (series.rho + series.mu) / rmax
    coeffs, iterations = {}, {}
    residual_sq = 0.0
    for name, (q_r, q_m) in (("c_x", (series.qx_rho, series.qx_mu)),
                             ("c_y", (series.qy_rho, series.qy_mu))):
        fit = _scalar_fit(name, [(q_r, series.rho * phi), (q_m, series.mu * phi)],
                          bounds[name])
        if fit is None:
            raise FlatObjectiveError(f"flat objective for {name} (degenerate series)")
        coeffs[name], fx, iterations[name] = fit
        residual_sq += fx
    return FitResult("shared", coeffs, math.sqrt(residual_sq), iterations, bounds,
                     identifiable={k: True for k in coeffs})


def fit_per_class(series: MacroSeries, rmax: float, bounds: dict | None = None) -> FitResult:
    """Fit the four length-weighted coefficients, one bounded 1D problem each.

    The occupancy is (rho + 2*mu)/rmax. Coefficients of a class absent from
    the whole series are flagged unidentifiable and reported as NaN.
    """
    base = {**DEFAULT_BOUNDS, **(bounds or {})}
    bounds_map = {"c_x_rho": base["c_x"], "c_x_mu": base["c_x"],
                  "c_y_rho": base["c_y"], "c_y_mu": base["c_y"]}
    phi = 1.0 - (series.rho + 2.0 * series.mu) / rmax
    problems = {
        "c_x_rho": (series.qx_rho, series.rho * phi),
        "c_y_rho": (series.qy_rho, series.rho * phi),
        "c_x_mu": (series.qx_mu, series.mu * phi),
        "c_y_mu": (series.qy_mu, series.mu * phi),
    }
    coeffs, iterations, identifiable = {}, {}, {}
    residual_sq = 0.0
    any_fit = False
    for name, (q_data, basis) in problems.items():
        fit = _scalar_fit(name, [(q_data, basis)], bounds_map[name])
        if fit is None:
            coeffs[name] = math.nan
            iterations[name] = 0
            identifiable[name] = False
            continue
        coeffs[name], fx, iterations[name] = fit
        identifiable[name] = True
        residual_sq += fx
        any_fit = True
    if not any_fit:
        raise FlatObjectiveError("no identifiable coefficient (empty series)")
    return FitResult("per_class", coeffs, math.sqrt(residual_sq), iterations,
                     {k: list(v) for k, v in bounds_map.items()}, identifiable)
