"""Command-line entry point: named experiments, ingestion, report emission.

    traffic2d <command> --config <path> --out <dir> [--seed N]

Commands: riemann-validate, simulate, calibrate, multilane. Every run writes
its artifacts plus a manifest.json (resolved config, file checksums) under
--out. Exit codes: 0 pass, 1 validation fail, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import calibration, config as config_mod, kde, multilane, riemann2d, scenarios
from .config import ConfigError
from .jsonio import json_default
from .model import FluxParams
from .snapshots import (read_field_csv, write_field_csv, write_lane_run,
                        write_run, write_sidecar)
from .solver import Field2D, Grid2D, Outflow, Periodic, SolverConfig, simulate


class ValidationFailure(Exception):
    """A run completed but its validation checks failed."""


def _sha256(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _write_manifest(out_dir, command, resolved, files, seed, extra=None):
    out = Path(out_dir)
    entries = [{"path": str(Path(f).relative_to(out)), "sha256": _sha256(f)}
               for f in sorted(set(map(str, files)))]
    doc = {"command": command, "config": resolved, "seed": seed, "files": entries}
    if extra:
        doc.update(extra)
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, default=json_default))


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, default=json_default))
    return path


def _bc(name):
    return Periodic() if name == "periodic" else Outflow()


def cmd_riemann_validate(cfg, out_dir, seed):
    if (cfg["case"] is None) == (cfg["rho_quadrants"] is None):
        raise ConfigError("give exactly one of 'case' or 'rho_quadrants'")
    sc = scenarios.riemann_scenario(cfg["case"], cfg["rho_quadrants"],
                                    n_cells=cfg["n_cells"])
    structure = riemann2d.classify(sc.quadrants, sc.flux)
    steps = []
    snaps = simulate(sc.field, sc.params,
                     SolverConfig(t_final=sc.t_final, cfl_safety=cfg["cfl_safety"]),
                     on_step=lambda t, dt: steps.append(t))
    final = snaps[-1][1]
    r = final.rho + final.mu
    tol = cfg["tol_cells"] * sc.grid.dx
    a_candidates = None
    if sc.printed_triple_points and "A" in sc.printed_triple_points:
        a_candidates = {"printed": sc.printed_triple_points["A"]}
    report = riemann2d.validate_field(sc.grid.xs(), sc.grid.ys(), r, structure,
                                      tol=tol, jump_fraction=cfg["jump_fraction"],
                                      a_candidates=a_candidates)

    out = Path(out_dir)
    files = []
    if cfg["write_snapshots"]:
        files += write_run(out / "snapshots", [snaps[0], snaps[-1]], sc.grid,
                           sc.params.to_dict(), step_counts=[0, len(steps)])
    doc = report.to_dict()
    doc["scenario"] = sc.name
    doc["quadrants_r"] = list(sc.quadrants.as_tuple())
    doc["step_count"] = len(steps)
    if sc.printed_triple_points:
        doc["a_candidates"] = {"derived": structure.triple_points["A"].as_tuple(),
                               "printed": sc.printed_triple_points["A"]}
    files.append(_write_json(out / "report.json", doc))
    _write_manifest(out_dir, "riemann-validate", cfg, files, seed,
                    extra={"passed": report.passed, "inconclusive": report.inconclusive})
    if not report.passed:
        raise ValidationFailure(f"case {structure.case.value}: validation checks failed")
    return 0


def _build_params(block):
    variant = block["variant"]
    if variant == "shared":
        if block["c_x"] is None or block["c_y"] is None:
            raise ConfigError("shared params need c_x and c_y")
        return FluxParams.shared(block["c_x"], block["c_y"], block["r_max"])
    names = ("c_x_rho", "c_y_rho", "c_x_mu", "c_y_mu")
    if any(block[n] is None for n in names):
        raise ConfigError(f"{variant} params need {names}")
    args = [block[n] for n in names] + [block["r_max"]]
    if variant == "length_weighted":
        return FluxParams.length_weighted(*args)
    return FluxParams.per_class_shared_max(*args)


def _com_trace(snapshots, component):
    trace = []
    for t, field in snapshots:
        com = field.center_of_mass(component)
        trace.append({"t": t, "x": None if com is None else com[0],
                      "y": None if com is None else com[1]})
    return trace


def _run_overtake(cfg, out_dir):
    sc = scenarios.overtake_scenario()
    t_final = cfg["t_final"] or sc.t_final
    snapshot_dt = cfg["snapshot_dt"] or 0.25
    steps = []
    snaps = simulate(sc.field, sc.params,
                     SolverConfig(t_final=t_final, cfl_safety=cfg["cfl_safety"],
                                  bc=_bc(cfg["bc"]), snapshot_dt=snapshot_dt),
                     on_step=lambda t, dt: steps.append(t))
    files = write_run(Path(out_dir) / "snapshots", snaps, sc.grid, sc.params.to_dict(),
                      step_counts=[0] + [len(steps)] * (len(snaps) - 1))
    car_trace = _com_trace(snaps, "rho")
    truck_trace = _com_trace(snaps, "mu")
    truck_mass = [field.total_mass()[1] for _, field in snaps]
    crossing = next((p["t"] for p, q in zip(car_trace, truck_trace)
                     if p["x"] is not None and q["x"] is not None and p["x"] > q["x"]), None)
    report = {
        "scenario": "overtake", "metadata": sc.metadata, "t_final": t_final,
        "step_count": len(steps),
        "car_center_of_mass": car_trace,
        "truck_center_of_mass": truck_trace,
        "truck_mass": truck_mass,
        "car_com_passes_truck_at_t": crossing,
    }
    return report, files


def _run_camera_standin(cfg, out_dir):
    sc = scenarios.camera_standin_scenario()
    t_final = cfg["t_final"] or 10.0
    error_dt = cfg["error_dt"]
    tracks = kde.fit_linear_tracks(sc.dataset)

    def truth_fields(t):
        cx, cy = kde.positions_at(tracks, t, "car")
        tx, ty = kde.positions_at(tracks, t, "truck")
        rho = kde.reconstruct_density(cx, cy, sc.grid, sc.kernel)
        mu = kde.reconstruct_density(tx, ty, sc.grid, sc.kernel)
        return rho, mu

    rho0, mu0 = truth_fields(0.0)
    initial = Field2D(sc.grid, rho0, mu0)
    steps = []
    snaps = simulate(initial, sc.params,
                     SolverConfig(t_final=t_final, cfl_safety=cfg["cfl_safety"],
                                  bc=_bc(cfg["bc"]), snapshot_dt=error_dt),
                     on_step=lambda t, dt: steps.append(t))
    errors = []
    for t, field in snaps:
        rho_truth, mu_truth = truth_fields(t)
        errors.append({
            "t": t,
            "E_rho": kde.normalized_l1_error(rho_truth, field.rho, sc.grid, sc.rmax_surface),
            "E_mu": kde.normalized_l1_error(mu_truth, field.mu, sc.grid, sc.rmax_surface),
            # plain vehicle-unit L1 distances for scale comparison
            "E_rho_veh": kde.l1_error(rho_truth, field.rho, sc.grid),
            "E_mu_veh": kde.l1_error(mu_truth, field.mu, sc.grid),
        })
    out = Path(out_dir)
    files = write_run(out / "snapshots", snaps, sc.grid, sc.params.to_dict(),
                      step_counts=[0] + [len(steps)] * (len(snaps) - 1))
    # error table as CSV for the plotting component
    err_csv = out / "errors.csv"
    np.savetxt(err_csv, [(e["t"], e["E_rho"], e["E_mu"]) for e in errors],
               delimiter=",", header="t_s,E_rho,E_mu", comments="")
    files.append(err_csv)
    traj_csv = out / "trajectories.csv"
    with open(traj_csv, "w") as fh:
        fh.write("vehicle_id,class,t_s,x_m,y_m\n")
        for v in sc.dataset.vehicles:
            for t, x, y in zip(v.t, v.x, v.y):
                fh.write(f"{v.vehicle_id},{v.vclass},{t},{x},{y}\n")
    files.append(traj_csv)
    report = {"scenario": "camera_standin", "metadata": sc.metadata,
              "t_final": t_final, "step_count": len(steps), "errors": errors,
              "kde_mass_t0": {"rho": kde.field_mass(rho0, sc.grid),
                              "mu": kde.field_mass(mu0, sc.grid)}}
    return report, files


def _run_custom(cfg, out_dir):
    if cfg["grid"] is None or cfg["params"] is None or cfg["initial_csv"] is None:
        raise ConfigError("custom simulate needs grid, params and initial_csv")
    g = cfg["grid"]
    grid = Grid2D(g["lx"], g["ly"], g["nx"], g["ny"], g["x0"], g["y0"])
    params = _build_params(cfg["params"])
    xs, ys, rho, mu = read_field_csv(cfg["initial_csv"])
    if rho.shape != (grid.Nx, grid.Ny):
        raise ConfigError("initial field does not match the grid")
    if cfg["t_final"] is None:
        raise ConfigError("custom simulate needs t_final")
    initial = Field2D(grid, rho, mu)
    steps = []
    snaps = simulate(initial, params,
                     SolverConfig(t_final=cfg["t_final"], cfl_safety=cfg["cfl_safety"],
                                  bc=_bc(cfg["bc"]), snapshot_dt=cfg["snapshot_dt"]),
                     on_step=lambda t, dt: steps.append(t))
    files = write_run(Path(out_dir) / "snapshots", snaps, grid, params.to_dict(),
                      step_counts=[0] + [len(steps)] * (len(snaps) - 1))
    report = {"scenario": "custom", "t_final": cfg["t_final"], "step_count": len(steps)}
    if cfg["reference_csv"] is not None:
        _, _, rho_ref, mu_ref = read_field_csv(cfg["reference_csv"])
        final = snaps[-1][1]
        report["final_l1_errors"] = {
            "rho": kde.l1_error(rho_ref, final.rho, grid),
            "mu": kde.l1_error(mu_ref, final.mu, grid),
        }
    return report, files


def cmd_simulate(cfg, out_dir, seed):
    if cfg["scenario"] == "overtake":
        report, files = _run_overtake(cfg, out_dir)
    elif cfg["scenario"] == "camera_standin":
        report, files = _run_camera_standin(cfg, out_dir)
    else:
        report, files = _run_custom(cfg, out_dir)
    files.append(_write_json(Path(out_dir) / "report.json", report))
    extra = {"standin": bool(report.get("metadata", {}).get("standin", False))}
    _write_manifest(out_dir, "simulate", cfg, files, seed, extra=extra)
    return 0


def cmd_calibrate(cfg, out_dir, seed):
    dataset = calibration.load_trajectories(cfg["trajectories"], cfg["format"])
    if cfg["rmax"] is None and cfg["rmax_geometry"] is None:
        raise ConfigError("give rmax or rmax_geometry")
    rmax = cfg["rmax"]
    if rmax is None:
        geo = cfg["rmax_geometry"]
        rmax = calibration.rmax_from_geometry(geo["lanes"], geo["effective_length_m"])
    bounds = None
    if cfg["bounds"] is not None:
        bounds = {k: tuple(v) for k, v in cfg["bounds"].items() if v is not None}
    series = calibration.macro_extract(dataset, cfg["lx_m"], cfg["dt_s"], cfg["variant"])
    aggregated = calibration.aggregate(series, cfg["kappa"])
    if cfg["variant"] == "shared":
        fit = calibration.fit_shared(aggregated, rmax, bounds)
    else:
        fit = calibration.fit_per_class(aggregated, rmax, bounds)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    fit_doc = fit.to_dict()
    fit_doc["rmax"] = rmax
    files.append(_write_json(out / "fit.json", fit_doc))
    # fundamental-diagram point cloud for the plotting component
    table = np.column_stack([aggregated.t, aggregated.rho, aggregated.mu,
                             aggregated.ux_rho, aggregated.uy_rho,
                             aggregated.ux_mu, aggregated.uy_mu,
                             aggregated.qx_rho, aggregated.qy_rho,
                             aggregated.qx_mu, aggregated.qy_mu])
    fd_csv = out / "fundamental_diagram.csv"
    np.savetxt(fd_csv, table, delimiter=",",
               header="t_s,rho,mu,ux_rho,uy_rho,ux_mu,uy_mu,qx_rho,qy_rho,qx_mu,qy_mu",
               comments="")
    files.append(fd_csv)
    _write_manifest(out_dir, "calibrate", cfg, files, seed)
    return 0


def cmd_multilane(cfg, out_dir, seed):
    sc = scenarios.multilane_scenario(cfg["lane_change_rate"])
    steps = []
    snaps = multilane.simulate(sc.fields, sc.params, cfg["t_final"],
                               cfl_safety=cfg["cfl_safety"], bc=_bc(cfg["bc"]),
                               snapshot_dt=cfg["snapshot_dt"],
                               on_step=lambda t, dt: steps.append(t))
    out = Path(out_dir)
    files = write_lane_run(out / "snapshots", snaps, sc.params.to_dict(),
                           step_counts=[0] + [len(steps)] * (len(snaps) - 1))
    masses = [{"t": t, **fields.masses()} for t, fields in snaps]
    initial, final = masses[0], masses[-1]
    report = {
        "scenario": "overtake_multilane", "metadata": sc.metadata,
        "t_final": cfg["t_final"], "step_count": len(steps),
        "lane_masses": masses,
        "lane2_car_mass_ratio": (final["rho2"] / initial["rho2"]
                                 if initial["rho2"] > 0 else None),
        "mu_invariant": bool(np.array_equal(snaps[0][1].mu1, snaps[-1][1].mu1)
                             and np.array_equal(snaps[0][1].mu2, snaps[-1][1].mu2)),
    }
    files.append(_write_json(out / "report.json", report))
    _write_manifest(out_dir, "multilane", cfg, files, seed)
    return 0


COMMANDS = {
    "riemann-validate": (config_mod.RIEMANN_VALIDATE_SCHEMA, cmd_riemann_validate),
    "simulate": (config_mod.SIMULATE_SCHEMA, cmd_simulate),
    "calibrate": (config_mod.CALIBRATE_SCHEMA, cmd_calibrate),
    "multilane": (config_mod.MULTILANE_SCHEMA, cmd_multilane),
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="traffic2d",
                                     description="2D two-class traffic toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    schema, handler = COMMANDS[args.command]
    try:
        raw = config_mod.load_config(args.config)
        resolved = config_mod.resolve(raw, schema)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    Path(args.out).mkdir(parents=True, exist_ok=True)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        return handler(resolved, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
