"""Smoke tests for the pybind11 bindings."""

import math

import pytest

import twomode as tm


def device_a():
    return tm.CircuitParams.symmetric(11.0, 0.5, 0.2)


def test_mode_parameters():
    mp = tm.mode_parameters(device_a())
    assert mp.omega_sigma == pytest.approx(6.6705, rel=2e-3)
    assert mp.omega_delta == pytest.approx(5.4485, rel=2e-3)
    assert mp.omega_sigma > mp.omega_delta
    assert mp.chi_sigma_delta == pytest.approx(0.668, rel=2e-2)


def test_spectrum_labels():
    sp = tm.solve_spectrum(device_a(), tm.ChargeConfig(0.0, 0.0))
    levels = sp.levels()
    assert levels[0][:2] == (0, 0)
    assert sp.energy(0, 1) - sp.energy(0, 0) == pytest.approx(5.4485, rel=2e-3)


def test_derive_energies():
    ec, ep = tm.derive_energies(100.0, 30.0)
    assert ec == pytest.approx(0.167324543544, rel=1e-9)
    assert ep == pytest.approx(0.0815707149778, rel=1e-9)


def test_delta_fs_round_trip():
    eps = 4.0e-3
    df1, df2 = tm.delta_fs(0.25, 0.15, eps)
    sols = tm.invert_delta_fs(df1, df2, eps)
    assert any(
        math.isclose(s[0], 0.25, abs_tol=1e-9) and math.isclose(s[1], 0.15, abs_tol=1e-9)
        for s in sols
    )
    with pytest.raises(tm.TwomodeError):
        tm.invert_delta_fs(5.0, 5.0, eps)


def test_ramsey_pipeline():
    eps = 4.0e-3
    cfg = tm.ExperimentConfig()
    cfg.delays_us = tm.uniform_delays(400, 20.0)
    offs = tm.branch_offsets_MHz(0.25, 0.15, eps)
    trace = tm.synthesize_trace(offs, [0.25] * 4, cfg, 42)
    fit = tm.fit_peaks(tm.spectrum(trace))
    assert fit.resolved
    truth1, truth2 = tm.delta_fs(0.25, 0.15, eps)
    assert fit.df1_MHz == pytest.approx(truth1, abs=0.05)
    assert fit.df2_MHz == pytest.approx(truth2, abs=0.05)
    sols = tm.charge_config_from_fit(fit, eps)
    best = min(
        math.hypot(s.ng_sigma - 0.25, s.ng_delta - 0.15) for s in sols
    )
    assert best < 2e-3


def test_localization():
    geom = tm.DeviceGeometry.device_a()
    grid_map = tm.surrogate_map(geom, 600.0, 121)
    s_sigma, s_delta = tm.surrogate_offsets(geom, 150.0, 80.0)
    region = tm.biangulate(s_sigma, s_delta, 5e-3, 5e-3, grid_map)
    assert not region.no_solution
    assert region.best_x_um == pytest.approx(150.0, abs=10.0)
    assert abs(region.best_y_um) == pytest.approx(80.0, abs=10.0)


def test_run_command():
    bundle = tm.run_command("spectrum", "")
    assert bundle.command == "spectrum"
    assert any(t.name == "levels" for t in bundle.tables)
