"""Snapshot files: CSV per field plus a JSON sidecar with run metadata.

2D solver snapshots: columns x_m, y_m, rho, mu (one row per cell, x-major).
Multilane snapshots: columns x_m, rho_lane1, mu_lane1, rho_lane2, mu_lane2.
A run directory holds <index>.csv / <index>.json pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .jsonio import json_default
from .multilane import LaneField
from .solver import Field2D, Grid2D


def write_field_csv(path, field: Field2D):
    grid = field.grid
    X, Y = np.meshgrid(grid.xs(), grid.ys(), indexing="ij")
    table = np.column_stack([X.ravel(), Y.ravel(), field.rho.ravel(), field.mu.ravel()])
    np.savetxt(path, table, delimiter=",", header="x_m,y_m,rho,mu", comments="")


def read_field_csv(path):
    """Returns (xs, ys, rho, mu) with the 2D arrays reshaped to (Nx, Ny)."""
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    xs = np.unique(table[:, 0])
    ys = np.unique(table[:, 1])
    shape = (len(xs), len(ys))
    if shape[0] * shape[1] != len(table):
        raise ValueError(f"{path}: not a full tensor grid")
    rho = table[:, 2].reshape(shape)
    mu = table[:, 3].reshape(shape)
    return xs, ys, rho, mu


def write_sidecar(path, grid_dict, params_dict, t, step_count, extra=None):
    doc = {"grid": grid_dict, "params": params_dict, "t": t, "step_count": step_count}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, default=json_default))


def write_run(out_dir, snapshots, grid: Grid2D, params_dict, step_counts=None):
    """Write a 2D run: <out_dir>/<index>.csv + .json; returns the file list."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for idx, (t, field) in enumerate(snapshots):
        csv_path = out / f"{idx:03d}.csv"
        json_path = out / f"{idx:03d}.json"
        write_field_csv(csv_path, field)
        steps = step_counts[idx] if step_counts else None
        write_sidecar(json_path, grid.to_dict(), params_dict, t, steps,
                      extra={"snapshot_index": idx})
        files.extend([csv_path, json_path])
    return files


def write_lane_csv(path, fields: LaneField):
    table = np.column_stack([fields.xs(), fields.rho1, fields.mu1,
                             fields.rho2, fields.mu2])
    np.savetxt(path, table, delimiter=",",
               header="x_m,rho_lane1,mu_lane1,rho_lane2,mu_lane2", comments="")


def read_lane_csv(path):
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    return (table[:, 0], table[:, 1], table[:, 2], table[:, 3], table[:, 4])


def write_lane_run(out_dir, snapshots, params_dict, step_counts=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for idx, (t, fields) in enumerate(snapshots):
        csv_path = out / f"{idx:03d}.csv"
        json_path = out / f"{idx:03d}.json"
        write_lane_csv(csv_path, fields)
        steps = step_counts[idx] if step_counts else None
        grid_dict = {"L": fields.L, "x0": fields.x0, "N": fields.n}
        write_sidecar(json_path, grid_dict, params_dict, t, steps,
                      extra={"snapshot_index": idx})
        files.extend([csv_path, json_path])
    return files
