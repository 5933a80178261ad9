import json
from pathlib import Path

import numpy as np
import pytest

from traffic2d.cli import main
from traffic2d.config import (CALIBRATE_SCHEMA, ConfigError,
                              RIEMANN_VALIDATE_SCHEMA, resolve)


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_config_resolve_defaults_and_unknown_keys():
    out = resolve({"case": "no_shocks"}, RIEMANN_VALIDATE_SCHEMA)
    assert out["n_cells"] == 500 and out["cfl_safety"] == 0.9
    with pytest.raises(ConfigError, match="unknown keys"):
        resolve({"case": "no_shocks", "bogus": 1}, RIEMANN_VALIDATE_SCHEMA)
    with pytest.raises(ConfigError, match="required"):
        resolve({"variant": "shared"}, CALIBRATE_SCHEMA)
    with pytest.raises(ConfigError, match="not in"):
        resolve({"case": "sixth_case"}, RIEMANN_VALIDATE_SCHEMA)


def test_cli_exit_codes_for_bad_configs(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["riemann-validate", "--config", missing, "--out", str(tmp_path / "o")]) == 2
    bad = _write(tmp_path, "bad.json", {"case": "no_shocks", "junk": True})
    assert main(["riemann-validate", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    both = _write(tmp_path, "both.json", {})
    assert main(["riemann-validate", "--config", both, "--out", str(tmp_path / "o")]) == 2


def test_riemann_validate_command_deterministic(tmp_path):
    cfg = _write(tmp_path, "r.json", {"case": "one_rarefaction", "n_cells": 250})
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["riemann-validate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["riemann-validate", "--config", cfg, "--out", str(out2)]) == 0
    rep1 = (out1 / "report.json").read_bytes()
    assert rep1 == (out2 / "report.json").read_bytes()
    report = json.loads(rep1)
    assert report["case"] == "one_rarefaction" and report["passed"]
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["command"] == "riemann-validate"
    assert manifest["config"]["n_cells"] == 250   # resolved config embedded
    names = {f["path"] for f in manifest["files"]}
    assert "report.json" in names
    assert all(len(f["sha256"]) == 64 for f in manifest["files"])
    assert (out1 / "snapshots" / "000.csv").exists()
    assert (out1 / "snapshots" / "001.json").exists()


def test_calibrate_command_recovers_coefficients(tmp_path):
    rng = np.random.default_rng(3)
    rows = ["vehicle_id,class,t_s,x_m,y_m"]
    # synthetic fleet with per-vehicle constant speeds; the fit target here is
    # only the pipeline wiring, not a specific coefficient value
    for k in range(12):
        vclass = "car" if k % 3 else "truck"
        speed = 24.0 + rng.uniform(-3, 3) if vclass == "car" else 19.0
        x0 = rng.uniform(0, 300)
        for t in np.arange(0.0, 30.0, 1.0):
            rows.append(f"v{k},{vclass},{t},{x0 + speed * t},{2.0 + (k % 3) * 4.0}")
    data = tmp_path / "traj.csv"
    data.write_text("\n".join(rows) + "\n")
    cfg = _write(tmp_path, "c.json", {
        "trajectories": str(data), "variant": "per_class", "lx_m": 1000.0,
        "dt_s": 1.0, "kappa": 5, "rmax_geometry": {"lanes": 3, "effective_length_m": 7.5}})
    out = tmp_path / "calib"
    assert main(["calibrate", "--config", cfg, "--out", str(out)]) == 0
    fit = json.loads((out / "fit.json").read_text())
    assert fit["rmax"] == pytest.approx(400.0)
    assert set(fit["coefficients"]) == {"c_x_rho", "c_y_rho", "c_x_mu", "c_y_mu"}
    table = np.loadtxt(out / "fundamental_diagram.csv", delimiter=",", skiprows=1)
    assert table.shape[1] == 11


def test_multilane_command_report(tmp_path):
    cfg = _write(tmp_path, "m.json", {"t_final": 1.0, "snapshot_dt": 0.5})
    out = tmp_path / "lanes"
    assert main(["multilane", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["mu_invariant"] is True
    assert len(report["lane_masses"]) == 3
    header = (out / "snapshots" / "000.csv").read_text().splitlines()[0]
    assert header == "x_m,rho_lane1,mu_lane1,rho_lane2,mu_lane2"


def test_simulate_custom_roundtrip(tmp_path):
    from traffic2d.model import ClassState
    from traffic2d.snapshots import write_field_csv
    from traffic2d.solver import Field2D, Grid2D
    grid = Grid2D(10.0, 10.0, 20, 20)
    field = Field2D.constant(grid, ClassState(0.1, 0.05))
    init = tmp_path / "init.csv"
    write_field_csv(init, field)
    cfg = _write(tmp_path, "s.json", {
        "grid": {"lx": 10.0, "ly": 10.0, "nx": 20, "ny": 20},
        "params": {"variant": "shared", "c_x": -1.0, "c_y": -1.0, "r_max": 1.0},
        "initial_csv": str(init), "t_final": 0.5, "reference_csv": str(init)})
    out = tmp_path / "sim"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    # constant state is exact: final field equals the reference
    assert report["final_l1_errors"]["rho"] == pytest.approx(0.0, abs=1e-12)


def test_simulate_overtake_report_fields(tmp_path):
    cfg = _write(tmp_path, "o.json", {"scenario": "overtake", "t_final": 0.5,
                                      "snapshot_dt": 0.25})
    out = tmp_path / "ot"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["car_center_of_mass"]) == 3
    assert report["truck_mass"][0] == pytest.approx(report["truck_mass"][-1], rel=1e-12)
