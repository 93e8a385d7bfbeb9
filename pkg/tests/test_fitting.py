"""Noise subtraction, scan parsing, and the shared-linewidth fit."""

import numpy as np
import pytest

from squeezekit.fitting import (
    FitConfig,
    MeasuredScan,
    ScanFormatError,
    fit_model,
    load_scan_csv,
    normalize_to_shot,
    subtract_electronic_noise,
    synthesize_scan,
)
from squeezekit.lineshape import LaserLineshape

GAUSS_700K = LaserLineshape(kind="gaussian", fwhm_hz=700e3)
FIBERS = tuple(np.linspace(0.0, 60.0, 16))


def test_noise_subtraction_reference_values():
    assert subtract_electronic_noise(0.0, -14.0) == pytest.approx(-0.176, abs=1e-3)
    assert subtract_electronic_noise(-2.3, -14.0) == pytest.approx(-2.604, abs=1e-3)


def test_noise_subtraction_identity_without_floor():
    x = np.array([-2.0, 0.0, 3.0])
    assert np.array_equal(subtract_electronic_noise(x, -np.inf), x)


def test_noise_subtraction_rejects_measured_at_floor():
    with pytest.raises(ValueError):
        subtract_electronic_noise(-14.0, -14.0)
    with pytest.raises(ValueError):
        subtract_electronic_noise(np.array([-1.0, -15.0]), -14.0)


def test_normalize_to_shot():
    raw = np.array([2.0, 2.0, 1.0])
    sql = np.array([2.0, 2.0, 2.0])
    out = normalize_to_shot(raw, sql)
    assert np.allclose(out[:2], 1.0)
    assert out[2] == pytest.approx(0.5)
    assert normalize_to_shot(10 ** (-0.3) * 2.0, 2.0) == pytest.approx(0.501, abs=1e-3)
    with pytest.raises(ValueError):
        normalize_to_shot(raw, np.array([2.0, 0.0, 2.0]))


def test_scan_validation():
    with pytest.raises(ValueError):
        MeasuredScan(1e6, (), (), ())
    with pytest.raises(ValueError):
        MeasuredScan(1e6, (0.0, 4.0), (-1.0,), (0.1, 0.1))
    with pytest.raises(ValueError):
        MeasuredScan(1e6, (0.0,), (-15.0,), (0.1,), electronics_floor_db=-14.0)
    with pytest.raises(ValueError):
        MeasuredScan(-1e6, (0.0,), (-1.0,), (0.1,))


def test_corrected_db_applies_floor():
    scan = MeasuredScan(1e6, (0.0, 4.0), (0.0, -2.3), (0.1, 0.1), electronics_floor_db=-14.0)
    got = scan.corrected_db()
    assert got == pytest.approx([-0.176, -2.604], abs=1e-3)
    bare = MeasuredScan(1e6, (0.0, 4.0), (0.0, -2.3), (0.1, 0.1))
    assert np.array_equal(bare.corrected_db(), [0.0, -2.3])


def test_load_scan_csv_round_trip(tmp_path):
    path = tmp_path / "scan_a.csv"
    path.write_text(
        "excess_fiber_m,noise_db,std_dev_db\n"
        "0.0,-1.5,0.04\n"
        "\n"
        "4.0,-1.8,0.04\n"
        "8.0,-2.1,0.04\n"
    )
    scan = load_scan_csv(path, demod_freq_hz=1e6)
    assert scan.excess_fiber_m == (0.0, 4.0, 8.0)
    assert scan.noise_db == (-1.5, -1.8, -2.1)
    assert scan.label == "scan_a"


def test_load_scan_csv_rejects_bad_inputs(tmp_path):
    wrong_header = tmp_path / "h.csv"
    wrong_header.write_text("fiber,noise,std\n0,1,0.1\n")
    with pytest.raises(ScanFormatError):
        load_scan_csv(wrong_header, demod_freq_hz=1e6)

    bad_cell = tmp_path / "c.csv"
    bad_cell.write_text("excess_fiber_m,noise_db,std_dev_db\n0.0,-1.5,0.04\n4.0,oops,0.04\n")
    with pytest.raises(ScanFormatError, match="line 3"):
        load_scan_csv(bad_cell, demod_freq_hz=1e6)

    empty = tmp_path / "e.csv"
    empty.write_text("excess_fiber_m,noise_db,std_dev_db\n")
    with pytest.raises(ScanFormatError):
        load_scan_csv(empty, demod_freq_hz=1e6)


def test_synthesized_floor_round_trip(default_params):
    kwargs = dict(
        p=default_params,
        shape=GAUSS_700K,
        demod_freq_hz=2e6,
        excess_fiber_m=FIBERS,
        offset_linear=0.05,
    )
    clean = synthesize_scan(rng=np.random.default_rng(42), **kwargs)
    with_floor = synthesize_scan(
        rng=np.random.default_rng(42), electronics_floor_db=-14.0, **kwargs
    )
    # subtraction must recover the floor-free signal
    assert with_floor.corrected_db() == pytest.approx(clean.noise_db, abs=1e-9)


def test_fit_recovers_ground_truth(default_params):
    rng = np.random.default_rng(314)
    scans = [
        synthesize_scan(
            default_params, GAUSS_700K, f_hz, FIBERS,
            offset_linear=off, noise_frac=0.005, rng=rng,
        )
        for f_hz, off in ((1e6, 0.05), (3e6, 0.0))
    ]
    cfg = FitConfig(n_starts=2)
    res = fit_model(scans, default_params, "gaussian", cfg)
    assert res.converged
    assert not res.degenerate
    assert res.lineshape_fwhm_hz == pytest.approx(700e3, rel=0.05)
    assert res.offsets_linear[0] == pytest.approx(0.05, abs=0.005)
    assert res.offsets_linear[1] == pytest.approx(0.0, abs=0.005)
    assert res.n_points == 32
    assert res.demod_freqs_hz == (1e6, 3e6)
    assert res.residual_rms_db < 0.1
    assert res.fwhm_std_hz is not None and res.fwhm_std_hz > 0.0


def test_fit_objective_history_is_monotone(default_params):
    rng = np.random.default_rng(99)
    scans = [
        synthesize_scan(default_params, GAUSS_700K, 2e6, FIBERS, noise_frac=0.005, rng=rng)
    ]
    res = fit_model(scans, default_params, "gaussian", FitConfig(n_starts=2))
    for start in res.starts:
        hist = np.array(start.objective_history)
        assert len(hist) > 0
        assert np.all(np.diff(hist) <= 1e-12)


def test_fit_scan_order_does_not_matter(default_params):
    rng = np.random.default_rng(7)
    scans = [
        synthesize_scan(
            default_params, GAUSS_700K, f_hz, FIBERS,
            offset_linear=off, noise_frac=0.005, rng=rng,
        )
        for f_hz, off in ((1e6, 0.07), (2e6, 0.03), (3e6, 0.0))
    ]
    cfg = FitConfig(n_starts=2)
    fwd = fit_model(scans, default_params, "gaussian", cfg)
    rev = fit_model(scans[::-1], default_params, "gaussian", cfg)
    assert rev.lineshape_fwhm_hz == pytest.approx(fwd.lineshape_fwhm_hz, rel=1e-4)
    assert rev.offsets_linear[::-1] == pytest.approx(fwd.offsets_linear, abs=1e-6)


def test_fit_with_frozen_offsets(default_params):
    rng = np.random.default_rng(11)
    scans = [
        synthesize_scan(
            default_params, GAUSS_700K, 2e6, FIBERS,
            offset_linear=0.04, noise_frac=0.005, rng=rng,
        )
    ]
    cfg = FitConfig(n_starts=2, fit_offsets=False, fixed_offsets=(0.04,))
    res = fit_model(scans, default_params, "gaussian", cfg)
    assert res.offsets_linear == (0.04,)
    assert res.lineshape_fwhm_hz == pytest.approx(700e3, rel=0.05)


def test_fit_flags_driftless_data_as_degenerate(default_params):
    rng = np.random.default_rng(23)
    scans = [
        synthesize_scan(
            default_params, LaserLineshape(kind="delta"), f_hz, FIBERS,
            noise_frac=0.002, rng=rng,
        )
        for f_hz in (1e6, 2e6)
    ]
    res = fit_model(scans, default_params, "gaussian", FitConfig(n_starts=2))
    assert res.degenerate
    assert res.lineshape_fwhm_hz < 3e5  # collapses toward the lower search bound
    for off in res.offsets_linear:
        assert off == pytest.approx(0.0, abs=0.01)


def test_fit_input_validation(default_params):
    tiny = MeasuredScan(1e6, (0.0, 4.0), (-1.0, -1.1), (0.1, 0.1))
    with pytest.raises(ValueError):
        fit_model([tiny], default_params, "gaussian")
    ok = MeasuredScan(1e6, (0.0, 4.0, 8.0), (-1.0, -1.1, -1.2), (0.1, 0.1, 0.1))
    with pytest.raises(ValueError):
        fit_model([ok], default_params, "delta")
    with pytest.raises(ValueError):
        fit_model([], default_params, "gaussian")
