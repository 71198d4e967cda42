import math

import numpy as np
import pytest

from relaydde import (History, HorizonExhausted, MergePhase, ModelParams,
                      RegimeError, evolve, merge_time, periodic_solution)

import _expected as exp
from conftest import random_oscillatory, random_z0_history


def test_p1_closed_form_values(orb1):
    assert math.isclose(orb1.x_min, exp.P1_XMIN, abs_tol=1e-15)
    assert math.isclose(orb1.x_max, exp.P1_XMAX, abs_tol=1e-15)
    assert math.isclose(orb1.z1, exp.P1_Z1, abs_tol=1e-14)
    assert math.isclose(orb1.z2, exp.P1_Z2, abs_tol=1e-14)
    assert math.isclose(orb1.period, exp.P1_T, abs_tol=1e-14)
    assert math.isclose(orb1.t_max, exp.P1_TMAX, abs_tol=1e-14)


def test_p2_closed_form_values(orb2):
    assert math.isclose(orb2.x_min, exp.P2_XMIN, abs_tol=1e-15)
    assert math.isclose(orb2.x_max, exp.P2_XMAX, abs_tol=1e-15)
    assert math.isclose(orb2.z1, exp.P2_Z1, abs_tol=1e-14)
    assert math.isclose(orb2.z2, exp.P2_Z2, abs_tol=1e-14)
    assert math.isclose(orb2.period, exp.P2_T, abs_tol=1e-14)


def test_zero_identity(orb1, orb2):
    # beta_L e^{z1} + beta_U e^{z2} = (beta_L + beta_U) e^{tau + z1}
    rng = np.random.default_rng(5)
    orbits = [orb1, orb2] + [periodic_solution(random_oscillatory(rng))
                             for _ in range(20)]
    for orb in orbits:
        p = orb.params
        lhs = p.beta_l * math.exp(orb.z1) + p.beta_u * math.exp(orb.z2)
        rhs = (p.beta_l + p.beta_u) * math.exp(p.tau + orb.z1)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_periodicity(p1, orb1):
    traj = evolve(p1, orb1.history_min_phase(), 3 * orb1.period)
    ts = np.linspace(0.0, 2 * orb1.period, 1000)
    dev = np.abs(traj.sample(ts) - traj.sample(ts + orb1.period))
    assert float(np.max(dev)) <= 1e-12


def test_extremum_placement(orb1):
    ts = np.linspace(-orb1.params.tau, orb1.period, 20001)
    xs = orb1.sample(ts)
    grid = ts[1] - ts[0]
    assert abs(ts[np.argmax(xs)] - orb1.t_max) <= grid
    t_min = ts[np.argmin(xs)]
    assert min(abs(t_min - 0.0), abs(t_min - orb1.period)) <= grid
    # the extrema are corners, so sampled values miss by at most grid * slope
    assert math.isclose(float(np.max(xs)), orb1.x_max, abs_tol=2 * grid)
    assert math.isclose(float(np.min(xs)), orb1.x_min, abs_tol=2 * grid)
    assert float(np.max(xs)) <= orb1.x_max + 1e-12
    assert float(np.min(xs)) >= orb1.x_min - 1e-12


def test_symmetric_levels_mirror():
    params = ModelParams(tau=1.3, beta_l=0.7, beta_u=0.7)
    orb = periodic_solution(params)
    assert math.isclose(orb.x_max, -orb.x_min, abs_tol=1e-15)
    assert math.isclose(orb.z2, 2 * orb.z1 + params.tau, abs_tol=1e-12)
    # the falling half-wave is the mirrored rising one
    for s in np.linspace(0.0, orb.z1 + params.tau, 200):
        assert abs(orb.value(orb.t_max + s) + orb.value(s)) <= 1e-12


def test_orbit_zeros_in(orb1):
    zs = orb1.zeros_in(0.0, 2 * orb1.period)
    expect = [orb1.z1, orb1.z2, orb1.z1 + orb1.period, orb1.z2 + orb1.period]
    assert np.allclose(zs, expect, atol=1e-12)


def test_regime_error():
    with pytest.raises(RegimeError):
        periodic_solution(ModelParams(tau=1.0, beta_l=0.4, beta_u=-0.3))


def test_merge_constant_history(p1, orb1):
    traj = evolve(p1, History.constant(1.0, 1.0), 4 * orb1.period)
    info = merge_time(traj, orb1)
    assert info is not None
    assert math.isclose(info.zero, exp.CONST1_FIRST_ZERO, abs_tol=1e-12)
    assert info.phase is MergePhase.MIN
    # decreasing through the whole delay interval after the merge zero
    ts = np.linspace(info.zero, info.zero + 1.0, 50)
    xs = traj.sample(ts)
    assert np.all(np.diff(xs) < 0)


def test_merge_orbit_start_immediate(p1, orb1):
    traj = evolve(p1, orb1.history_min_phase(), 3 * orb1.period)
    info = merge_time(traj, orb1)
    assert info is not None
    assert math.isclose(info.zero, orb1.z1, abs_tol=1e-12)
    assert info.phase is MergePhase.MAX


def test_merge_universality(p1, orb1):
    rng = np.random.default_rng(23)
    horizon = orb1.period * 2 + 2 * p1.tau + orb1.period
    for _ in range(100):
        hist = random_z0_history(rng, p1.tau)
        traj = evolve(p1, hist, horizon)
        info = merge_time(traj, orb1)
        assert info is not None
        z1_phi = traj.zeros[0].t
        assert info.zero <= z1_phi + p1.tau + 1e-12
        want = MergePhase.MAX if traj.zeros[0].up else MergePhase.MIN
        assert info.phase is want


def test_merge_horizon_exhausted(p1, orb1):
    traj = evolve(p1, History.constant(1.0, 1.0), 1.5)
    with pytest.raises(HorizonExhausted):
        merge_time(traj, orb1)


def test_merge_random_params():
    rng = np.random.default_rng(41)
    for _ in range(10):
        params = random_oscillatory(rng)
        orb = periodic_solution(params)
        hist = random_z0_history(rng, params.tau)
        traj = evolve(params, hist, 2 * orb.period + 2 * params.tau + orb.period)
        info = merge_time(traj, orb)
        assert info is not None
        assert info.zero <= traj.zeros[0].t + params.tau + 1e-12
