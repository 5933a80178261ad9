import numpy as np
import pytest

from traffic2d.model import ClassState
from traffic2d.multilane import (LaneField, MultilaneParams, compute_dt,
                                 godunov_flux_scalar, lane_speed, simulate,
                                 source_terms, step)
from traffic2d.solver import Periodic, StabilityError

PARAMS = MultilaneParams(c_rho=80.0, c_mu=20.0, r_max=400.0, lane_change_rate=1.0)


def test_source_identical_lanes_vanishes():
    state = ClassState(30.0, 10.0)
    assert source_terms(state, state, PARAMS) == (0.0, 0.0)


def test_source_jammed_lane_drains_toward_empty_lane():
    jammed = ClassState(300.0, 100.0)   # occupancy r_max, u = 0
    empty = ClassState(0.0, 0.0)
    s_rho, s_mu = source_terms(jammed, empty, PARAMS)
    assert s_rho == pytest.approx(PARAMS.lane_change_rate * PARAMS.c_rho * 300.0)
    assert s_mu == pytest.approx(PARAMS.lane_change_rate * PARAMS.c_mu * 100.0)
    assert s_rho > 0.0   # positive source moves mass toward lane 2


def test_source_matches_direct_formula_random():
    rng = np.random.default_rng(3)
    for _ in range(500):
        l1 = ClassState(rng.uniform(0, 150), rng.uniform(0, 100))
        l2 = ClassState(rng.uniform(0, 150), rng.uniform(0, 100))
        s_rho, s_mu = source_terms(l1, l2, PARAMS)
        du_rho = (lane_speed(l2.rho, l2.mu, PARAMS.c_rho, PARAMS.r_max)
                  - lane_speed(l1.rho, l1.mu, PARAMS.c_rho, PARAMS.r_max))
        du_mu = (lane_speed(l2.rho, l2.mu, PARAMS.c_mu, PARAMS.r_max)
                 - lane_speed(l1.rho, l1.mu, PARAMS.c_mu, PARAMS.r_max))
        expected_rho = PARAMS.lane_change_rate * (max(du_rho, 0.0) * l1.rho
                                                  + min(du_rho, 0.0) * l2.rho)
        expected_mu = PARAMS.lane_change_rate * (max(du_mu, 0.0) * l1.mu
                                                 + min(du_mu, 0.0) * l2.mu)
        assert s_rho == pytest.approx(expected_rho, rel=1e-12, abs=1e-12)
        assert s_mu == pytest.approx(expected_mu, rel=1e-12, abs=1e-12)


def test_godunov_flux_consistency():
    for v in (0.0, 80.0, 250.0):
        f = v * 80.0 * (1.0 - (v + 30.0) / 400.0)
        assert godunov_flux_scalar(v, v, 80.0, 30.0, 400.0) == pytest.approx(f)


def test_godunov_flux_concave_max_example():
    assert godunov_flux_scalar(300.0, 100.0, 80.0, 0.0, 400.0) == pytest.approx(8000.0)


def test_godunov_flux_zero_speed_class():
    rng = np.random.default_rng(5)
    for _ in range(100):
        left, right = rng.uniform(0, 350, 2)
        assert godunov_flux_scalar(left, right, 0.0, 20.0, 400.0) == 0.0


def test_godunov_flux_monotone():
    rng = np.random.default_rng(7)
    delta = 1e-3
    for _ in range(10_000):
        left, right = rng.uniform(0, 320, 2)
        occ = rng.uniform(0, 60)
        c = rng.choice([80.0, -0.5])
        base = godunov_flux_scalar(left, right, c, occ, 400.0)
        assert godunov_flux_scalar(left + delta, right, c, occ, 400.0) >= base - 1e-12
        assert godunov_flux_scalar(left, right + delta, c, occ, 400.0) <= base + 1e-12


def _uniform_fields(n=50, rho1=20.0, mu1=5.0, rho2=20.0, mu2=5.0):
    return LaneField(100.0, 0.0, np.full(n, rho1), np.full(n, mu1),
                     np.full(n, rho2), np.full(n, mu2))


def test_step_identical_constant_lanes_unchanged():
    fields = _uniform_fields()
    out = step(fields, PARAMS, 1e-3)
    np.testing.assert_allclose(out.rho1, fields.rho1, atol=1e-12)
    np.testing.assert_allclose(out.mu2, fields.mu2, atol=1e-12)


def test_decoupled_lanes_conserve_mass_periodic():
    params = MultilaneParams(80.0, 20.0, 400.0, lane_change_rate=0.0)
    rng = np.random.default_rng(11)
    n = 64
    fields = LaneField(100.0, 0.0, rng.uniform(5, 60, n), rng.uniform(0, 20, n),
                       rng.uniform(5, 60, n), rng.uniform(0, 20, n))
    m0 = fields.masses()
    for _ in range(50):
        dt = compute_dt(fields, params, 0.9)
        fields = step(fields, params, dt, Periodic())
    m1 = fields.masses()
    for key in m0:
        assert m1[key] == pytest.approx(m0[key], rel=1e-12)


def test_combined_conservation_with_sources_periodic():
    rng = np.random.default_rng(13)
    n = 64
    fields = LaneField(100.0, 0.0, rng.uniform(5, 60, n), rng.uniform(0, 20, n),
                       rng.uniform(5, 60, n), rng.uniform(0, 20, n))
    m0 = fields.masses()
    for _ in range(100):
        dt = compute_dt(fields, PARAMS, 0.9)
        fields = step(fields, PARAMS, dt, Periodic())
    m1 = fields.masses()
    assert (m1["rho1"] + m1["rho2"]) == pytest.approx(m0["rho1"] + m0["rho2"], rel=1e-10)
    assert (m1["mu1"] + m1["mu2"]) == pytest.approx(m0["mu1"] + m0["mu2"], rel=1e-10)


def test_source_antisymmetry_cell_by_cell():
    rng = np.random.default_rng(17)
    n = 32
    fields = LaneField(100.0, 0.0, rng.uniform(5, 80, n), rng.uniform(0, 30, n),
                       rng.uniform(5, 80, n), rng.uniform(0, 30, n))
    dt = compute_dt(fields, PARAMS, 0.5)
    out = step(fields, PARAMS, dt, Periodic())
    # transport-only twin isolates the source exchange
    no_src = MultilaneParams(PARAMS.c_rho, PARAMS.c_mu, PARAMS.r_max, 0.0)
    base = step(fields, no_src, dt, Periodic())
    np.testing.assert_allclose(out.rho1 - base.rho1, -(out.rho2 - base.rho2), atol=1e-12)
    np.testing.assert_allclose(out.mu1 - base.mu1, -(out.mu2 - base.mu2), atol=1e-12)


def test_zero_speed_class_exactly_invariant():
    params = MultilaneParams(80.0, 0.0, 400.0, 1.0)
    rng = np.random.default_rng(19)
    n = 50
    fields = LaneField(100.0, 0.0, rng.uniform(5, 60, n), rng.uniform(0, 30, n),
                       rng.uniform(5, 60, n), rng.uniform(0, 30, n))
    mu1_0 = fields.mu1.copy()
    mu2_0 = fields.mu2.copy()
    for _ in range(30):
        dt = compute_dt(fields, params, 0.9)
        fields = step(fields, params, dt)
    assert np.array_equal(fields.mu1, mu1_0)
    assert np.array_equal(fields.mu2, mu2_0)


def test_step_rejects_inadmissible_growth():
    n = 20
    fields = LaneField(100.0, 0.0, np.full(n, 390.0), np.full(n, 30.0),
                       np.zeros(n), np.zeros(n))
    with pytest.raises(StabilityError):
        step(fields, PARAMS, 1.0, Periodic())


def test_simulate_snapshot_times():
    fields = _uniform_fields()
    snaps = simulate(fields, PARAMS, 0.02, snapshot_dt=0.01)
    assert [t for t, _ in snaps] == pytest.approx([0.0, 0.01, 0.02])
