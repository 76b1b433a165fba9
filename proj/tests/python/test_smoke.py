"""Smoke tests for the python extension module."""

import math

import numpy as np
import pytest

import gpabench as gb


def test_schedule_endpoints():
    spec = gb.ScheduleSpec(total_steps=100, peak_lr=1.0, warmup_fraction=0.1,
                           min_fraction=0.0, shape="cosine")
    assert gb.schedule_value(spec, 10) == pytest.approx(1.0, abs=1e-14)
    assert gb.schedule_value(spec, 100) == pytest.approx(0.0, abs=1e-14)
    assert gb.schedule_value(spec, 55) == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(Exception):
        gb.schedule_value(spec, 0)


def test_clip():
    out = gb.clip_gradient(np.array([3.0, 4.0]), 1.0)
    assert out == pytest.approx([0.6, 0.8], abs=1e-12)
    small = np.array([0.3, 0.4])
    assert np.array_equal(gb.clip_gradient(small, 1.0), small)


def test_conversion_table():
    expected = {1: 0.9000, 4: 0.9740, 8: 0.9869, 16: 0.9934,
                32: 0.9967, 64: 0.9984, 128: 0.9992}
    for h, mu_x in expected.items():
        got_x, got_y = gb.map_diloco_to_gpa(0.9, h)
        assert round(got_x, 4) == mu_x
        assert got_y == 0.9


def test_gpa_hand_trace():
    opt = gb.Gpa(np.array([1.0]), mu_x=0.5, mu_y=0.5)
    opt.step(lambda w: w, 0.1)
    assert opt.base_point[0] == pytest.approx(0.9, abs=1e-15)
    assert opt.eval_point[0] == pytest.approx(0.95, abs=1e-15)
    assert opt.train_point[0] == pytest.approx(0.925, abs=1e-15)


def test_gpa_mu_x_zero_is_base_sgd():
    problem = gb.QuadraticProblem.random(8, seed=5, eig_min=0.5, eig_max=3.0)
    rng = gb.RngStream(1, 0)
    x0 = rng.normal_vector(8)
    opt = gb.Gpa(x0, mu_x=0.0, mu_y=0.5)
    x = x0.copy()
    for _ in range(50):
        opt.step(lambda w: problem.exact_gradient(w), 0.05)
        x = x - 0.05 * problem.exact_gradient(x)
    assert np.max(np.abs(opt.eval_point - x)) <= 1e-12


def test_mem_form_matches_full_form():
    problem = gb.QuadraticProblem.random(10, seed=7, eig_min=0.5, eig_max=2.0)
    rng = gb.RngStream(2, 0)
    x0 = rng.normal_vector(10)
    full = gb.Gpa(x0, mu_x=0.99, mu_y=0.9, base="adamw", weight_decay=0.1)
    mem = gb.GpaMem(x0, mu_x=0.99, mu_y=0.9, base="adamw", weight_decay=0.1)
    oracle = lambda w: problem.exact_gradient(w)
    for _ in range(200):
        full.step(oracle, 0.05)
        mem.step(oracle, 0.05)
    assert np.max(np.abs(full.eval_point - mem.eval_point)) <= 1e-9


def test_diloco_and_schedule_free_run():
    problem = gb.QuadraticProblem.random(6, seed=9, eig_min=0.5, eig_max=2.0)
    rng = gb.RngStream(3, 0)
    x0 = rng.normal_vector(6)
    oracle = lambda w: problem.exact_gradient(w)

    diloco = gb.Diloco(x0, momentum=0.9, outer_lr=0.75, inner_steps=4)
    for _ in range(64):
        diloco.step(oracle, 0.05)
    assert problem.loss(diloco.outer) < problem.loss(x0)
    assert diloco.aux_buffer_count == 2  # outer copy + momentum with sgd base

    sf = gb.ScheduleFree(x0, interp=0.9, lr=0.05)
    for _ in range(200):
        sf.step(oracle)
    assert problem.loss(sf.avg) < problem.loss(x0)


def test_bound_ledger_holds_on_deterministic_run():
    problem = gb.QuadraticProblem.random(6, seed=11, eig_min=0.5, eig_max=3.0)
    rng = gb.RngStream(4, 0)
    x0 = rng.normal_vector(6)
    mu_x, mu_y = 0.9, 0.5
    opt = gb.Gpa(x0, mu_x=mu_x, mu_y=mu_y)
    ledger = gb.BoundLedger(problem, problem.optimum(), mu_x, mu_y)
    eval_prev = opt.eval_point
    for _ in range(100):
        ledger.accumulate(eval_prev, opt.eval_point, opt.train_point, opt.base_point)
        eval_prev = opt.eval_point
        opt.step(lambda w: problem.exact_gradient(w), 0.05)
    lhs, rhs, holds = ledger.check_bound()
    assert holds
    assert lhs <= rhs + 1e-9


def test_fit_rate_synthetic():
    horizons = [256.0, 1024.0, 4096.0, 16384.0]
    gaps = [2.0 / math.sqrt(t) for t in horizons]
    assert gb.fit_rate(horizons, gaps) == pytest.approx(-0.5, abs=1e-12)


def test_run_config_json_deterministic():
    config = """{
      "method": "gpa", "total_steps": 60, "seed": 4, "eval_every": 20,
      "record_wall_time": false,
      "optimizer": {"base": "sgd", "clip": false, "mu_x": 0.9, "mu_y": 0.9},
      "problem": {"kind": "quadratic", "dim": 8, "eig_min": 0.5, "eig_max": 2.0,
                  "noise_std": 0.1, "seed": 6},
      "schedule": {"peak_lr": 0.05, "warmup_fraction": 0.1, "min_fraction": 0.0,
                   "shape": "cosine"}
    }"""
    csv_a, diverged_a = gb.run_config_json(config)
    csv_b, diverged_b = gb.run_config_json(config)
    assert not diverged_a and not diverged_b
    assert csv_a == csv_b
    assert csv_a.startswith("step,lr,loss_x,loss_y,loss_z,dist_opt,wall_ms\n")
    assert len(csv_a.strip().splitlines()) == 4  # header + 3 eval rows
