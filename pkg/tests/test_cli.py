"""End-to-end CLI runs in a subprocess: files, exit codes, messages."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from squeezekit.config import default_config_path

DATA_DIR = default_config_path().parent


def run_cli(*args, timeout=120):
    return subprocess.run(
        [sys.executable, "-m", "squeezekit.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


@pytest.fixture()
def config_file(tmp_path):
    """Default config with scan CSVs resolved to absolute paths."""

    def write(**overrides):
        cfg = json.loads(default_config_path().read_text())
        for entry in cfg["fit"]["scans"]:
            entry["csv_path"] = str(DATA_DIR / entry["csv_path"])
        for key, value in overrides.items():
            node = cfg
            *parents, leaf = key.split(".")
            for part in parents:
                node = node[part]
            node[leaf] = value
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path

    return write


def test_help_exits_zero():
    r = run_cli("--help")
    assert r.returncode == 0
    for sub in ("spectrum", "delay-scan", "budget", "fit"):
        assert sub in r.stdout


def test_spectrum_writes_documents(config_file, tmp_path):
    out = tmp_path / "out"
    r = run_cli(
        "spectrum", "--config", str(config_file()), "--out", str(out),
        "--demod-hz", "2e6", "--no-timestamp",
    )
    assert r.returncode == 0, r.stderr
    assert (out / "spectrum_2mhz.csv").exists()
    assert (out / "spectrum_2mhz.svg").exists()
    assert "wrote 2 files" in r.stdout
    assert "-2.500" in r.stdout


def test_budget_reports_correction(config_file, tmp_path):
    out = tmp_path / "out"
    r = run_cli("budget", "--config", str(config_file()), "--out", str(out), "--no-timestamp")
    assert r.returncode == 0, r.stderr
    payload = json.loads((out / "budget.json").read_text())
    assert payload["tau_d_s"] == pytest.approx(
        payload["lo_total_s"] - payload["squeeze_total_s"], abs=1e-18
    )


def test_delay_scan_emits_per_frequency_files(config_file, tmp_path):
    out = tmp_path / "out"
    r = run_cli("delay-scan", "--config", str(config_file()), "--out", str(out), "--no-timestamp")
    assert r.returncode == 0, r.stderr
    for tag in ("1mhz", "2mhz", "3mhz"):
        assert (out / f"delay_scan_{tag}.csv").exists()
        assert (out / f"delay_scan_{tag}.svg").exists()
    sidecar = json.loads((out / "delay_scan_optima.json").read_text())
    lengths = [o["fiber_excess_m"] for o in sidecar["optima"]]
    assert lengths[0] > lengths[1] > lengths[2] > 0


def test_missing_config_is_input_error(tmp_path):
    r = run_cli("spectrum", "--config", str(tmp_path / "absent.json"))
    assert r.returncode == 2
    assert "error" in r.stderr.lower()


def test_malformed_config_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    r = run_cli("spectrum", "--config", str(bad))
    assert r.returncode == 2


def test_unknown_key_is_input_error(config_file, tmp_path):
    cfg = json.loads(config_file().read_text())
    cfg["typo_key"] = 1
    p = tmp_path / "unknown.json"
    p.write_text(json.dumps(cfg))
    r = run_cli("spectrum", "--config", str(p))
    assert r.returncode == 2
    assert "typo_key" in r.stderr


def test_budget_without_ledger_is_input_error(config_file, tmp_path):
    cfg = json.loads(config_file().read_text())
    del cfg["ledger"]
    p = tmp_path / "no_ledger.json"
    p.write_text(json.dumps(cfg))
    r = run_cli("budget", "--config", str(p))
    assert r.returncode == 2
    assert "ledger" in r.stderr


def test_empty_scan_csv_is_input_error(config_file, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("excess_fiber_m,noise_db,std_dev_db\n")
    cfg_path = config_file(**{"fit.compare_lineshapes": False})
    r = run_cli(
        "fit", "--config", str(cfg_path), "--out", str(tmp_path / "out"),
        str(empty), str(empty), str(empty),
    )
    assert r.returncode == 2
    assert "no data rows" in r.stderr


def test_scan_override_count_mismatch_is_input_error(config_file, tmp_path):
    one = tmp_path / "one.csv"
    one.write_text("excess_fiber_m,noise_db,std_dev_db\n0,-1,0.1\n")
    r = run_cli("fit", "--config", str(config_file()), str(one))
    assert r.returncode == 2


def test_starved_quadrature_is_numerical_error(config_file, tmp_path):
    cfg_path = config_file(
        **{
            "lineshape": {"kind": "lorentzian", "fwhm_hz": 300e3},
            "quadrature": {"rel_tol": 1e-15, "max_intervals": 16},
        }
    )
    r = run_cli("delay-scan", "--config", str(cfg_path), "--out", str(tmp_path / "out"))
    assert r.returncode == 3
    assert "tau_d" in r.stderr


def test_non_converged_fit_exits_three_but_saves(config_file, tmp_path):
    out = tmp_path / "out"
    cfg_path = config_file(
        **{
            "fit.max_iterations": 10,
            "fit.n_starts": 1,
            "fit.compare_lineshapes": False,
        }
    )
    r = run_cli("fit", "--config", str(cfg_path), "--out", str(out), "--no-timestamp")
    assert r.returncode == 3
    payload = json.loads((out / "fit_result.json").read_text())
    assert payload["converged"] is False


def test_fit_round_trip_on_sample_data(config_file, tmp_path):
    out = tmp_path / "out"
    cfg_path = config_file(**{"fit.compare_lineshapes": False})
    r = run_cli("fit", "--config", str(cfg_path), "--out", str(out), "--no-timestamp")
    assert r.returncode == 0, r.stderr
    payload = json.loads((out / "fit_result.json").read_text())
    assert payload["converged"] is True
    assert payload["lineshape_fwhm_hz"] == pytest.approx(700e3, rel=0.05)
    assert (out / "fit_overlay.svg").exists()


def test_output_directory_created_nested(config_file, tmp_path):
    out = tmp_path / "a" / "b" / "c"
    r = run_cli("budget", "--config", str(config_file()), "--out", str(out), "--no-timestamp")
    assert r.returncode == 0
    assert (out / "budget.json").exists()
