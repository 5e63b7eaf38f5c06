"""Command line behavior: exit codes, strict config, deterministic output."""

import json
import subprocess
import sys

import pytest

BISTABLE_FLAGS = [
    "--delta-a-rad", "0.5", "--kappa-a-rad", "1", "--omega-b-rad", "1",
    "--gamma-b-rad", "0.01", "--g-0-rad", "0", "--delta-m-rad", "3",
    "--kappa-m-rad", "0.3", "--kerr-rad", "0.05", "--j-coupling-rad", "0.8",
    "--epsilon-d-rad", "5",
]


def run_cli(*args, cwd):
    return subprocess.run([sys.executable, "-m", "kerrcool.cli", *args],
                          cwd=cwd, capture_output=True, text=True,
                          timeout=300)


def test_rates_reports_the_sb_quantum_limit(tmp_path):
    res = run_cli("rates", "--scheme", "SB", "--kappa-over-4wb", "10",
                  "--detuning", "opt", cwd=tmp_path)
    assert res.returncode == 0
    header, row = (tmp_path / "kerrcool_rates.csv").read_text().splitlines()
    n_q = float(dict(zip(header.split(","), row.split(",")))["n_q"])
    assert n_q == pytest.approx(9.51250, abs=1e-5)


def test_unknown_config_key_is_a_config_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"effective": {"kappa_over_4wb": 1,
                                             "detuning": "opt",
                                             "wrong": 3}}))
    res = run_cli("rates", "--config", str(cfg), cwd=tmp_path)
    assert res.returncode == 2
    assert "wrong" in res.stderr


def test_flags_override_the_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"effective": {"kappa_over_4wb": 1,
                                             "detuning": "opt"},
                               "scheme": "SB"}))
    res = run_cli("rates", "--config", str(cfg), "--kappa-over-4wb", "10",
                  cwd=tmp_path)
    assert res.returncode == 0
    header, row = (tmp_path / "kerrcool_rates.csv").read_text().splitlines()
    kappa = float(dict(zip(header.split(","), row.split(",")))["kappa_rad"])
    assert kappa == 40.0


def test_conflicting_unit_variants_are_rejected(tmp_path):
    res = run_cli("rates", "--kappa-rad", "2", "--kappa-over-4wb", "1",
                  "--detuning", "opt", cwd=tmp_path)
    assert res.returncode == 2
    assert "at most one" in res.stderr


def test_scheme_constraints_are_enforced(tmp_path):
    res = run_cli("rates", "--scheme", "SB", "--kappa-over-4wb", "1",
                  "--detuning", "opt", "--xi", "ks", cwd=tmp_path)
    assert res.returncode == 2
    res = run_cli("rates", "--scheme", "KS", "--kappa-over-4wb", "1",
                  "--detuning", "opt", "--r-s", "0.5", cwd=tmp_path)
    assert res.returncode == 2


def test_infeasible_matching_exits_3(tmp_path):
    # blue detuning: the matching condition has no solution
    res = run_cli("rates", "--scheme", "SS", "--kappa-over-4wb", "1",
                  "--detuning-rad", "-2.2", cwd=tmp_path)
    assert res.returncode == 3
    assert "infeasible" in res.stderr.lower()


def test_figure_without_thermal_occupation_exits_3(tmp_path):
    res = run_cli("figure", "fig2c", cwd=tmp_path)
    assert res.returncode == 3
    assert "--n-th" in res.stderr


def test_repeat_runs_are_byte_identical(tmp_path):
    args = ("rates", "--scheme", "KS", "--kappa-over-4wb", "10",
            "--detuning", "opt")
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert run_cli(*args, cwd=a).returncode == 0
    assert run_cli(*args, cwd=b).returncode == 0
    assert (a / "kerrcool_rates.csv").read_bytes() == \
        (b / "kerrcool_rates.csv").read_bytes()
    assert (a / "kerrcool_rates_meta.json").read_bytes() == \
        (b / "kerrcool_rates_meta.json").read_bytes()


def test_sweep_is_deterministic_across_worker_counts(tmp_path):
    base = ("sweep", "--scheme", "KS", "--detuning", "opt", "--sweep-axis",
            "kappa_over_4wb", "--sweep-start", "0.1", "--sweep-stop", "10",
            "--sweep-count", "7", "--sweep-spacing", "log")
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert run_cli(*base, "--workers", "1", cwd=a).returncode == 0
    assert run_cli(*base, "--workers", "4", cwd=b).returncode == 0
    assert (a / "kerrcool_sweep.csv").read_bytes() == \
        (b / "kerrcool_sweep.csv").read_bytes()


def test_steady_lists_every_branch(tmp_path):
    res = run_cli("steady", *BISTABLE_FLAGS, cwd=tmp_path)
    assert res.returncode == 0
    lines = (tmp_path / "kerrcool_steady.csv").read_text().splitlines()
    assert len(lines) == 1 + 3  # header plus three branches
    meta = json.loads((tmp_path / "kerrcool_steady_meta.json").read_text())
    assert meta["root_count"] == 3
    assert meta["selected_root"] == 0


def test_steady_root_selection_out_of_range(tmp_path):
    res = run_cli("steady", *BISTABLE_FLAGS, "--root", "7", cwd=tmp_path)
    assert res.returncode == 2


def test_spectrum_csv_shape(tmp_path):
    res = run_cli("spectrum", "--scheme", "SB", "--kappa-over-4wb", "1",
                  "--detuning", "opt", "--count", "11", cwd=tmp_path)
    assert res.returncode == 0
    lines = (tmp_path / "kerrcool_spectrum.csv").read_text().splitlines()
    assert lines[0] == "omega_rad,omega_over_wb,value"
    assert len(lines) == 12


def test_figure_preset_writes_csv_and_meta(tmp_path):
    res = run_cli("figure", "fig2b", "--count", "5", cwd=tmp_path)
    assert res.returncode == 0
    lines = (tmp_path / "kerrcool_fig2b.csv").read_text().splitlines()
    assert lines[0] == "kappa_over_4wb,net_rate_sb,net_rate_ks_opt,ratio"
    last = lines[-1].split(",")
    assert float(last[0]) == pytest.approx(100.0)
    assert float(last[3]) == pytest.approx(100.5012499921876, rel=1e-12)


def test_plot_writes_svg(tmp_path):
    res = run_cli("spectrum", "--scheme", "SB", "--kappa-over-4wb", "1",
                  "--detuning", "opt", "--count", "11", "--plot",
                  cwd=tmp_path)
    assert res.returncode == 0
    svg = (tmp_path / "kerrcool_spectrum.svg").read_bytes()
    assert svg.startswith(b"<?xml")


def test_version_flag():
    res = subprocess.run([sys.executable, "-m", "kerrcool.cli", "--version"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0
    assert "kerrcool" in res.stdout
