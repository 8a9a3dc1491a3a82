import json

import pytest

from osaas_probe.cli import main

from conftest import REPO_ROOT

SCENARIOS = REPO_ROOT / "scenarios"


@pytest.fixture(scope="module")
def curves_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("curves")
    assert main(["characterize", "--out", str(out)]) == 0
    return out


def run(args):
    return main([str(a) for a in args])


def test_characterize_writes_eleven_curves(curves_dir):
    files = sorted(p.name for p in curves_dir.glob("*.json"))
    assert len(files) == 11
    assert "DP-QPSK-69.4.json" in files


def test_characterize_empty_catalog(tmp_path):
    catalog_path = tmp_path / "empty.json"
    catalog_path.write_text("[]")
    out = tmp_path / "curves"
    assert run(["characterize", "--catalog", catalog_path, "--out", out]) == 0
    assert list(out.glob("*.json")) == []


def test_characterize_insufficient_grid_fails(tmp_path):
    out = tmp_path / "curves"
    code = run(["characterize", "--out", out, "--grid-step-db", "7.5"])
    assert code == 3


def test_probe_command_and_exit_codes(tmp_path, curves_dir):
    out = tmp_path / "out"
    code = run(["probe", "--scenario", SCENARIOS / "LH-1016.json",
                "--curves", curves_dir, "--out", out])
    assert code == 0
    report = json.loads((out / "LH-1016-report.json").read_text())
    assert report["schema_version"] == 1
    assert report["symbol_rate_cap_gbd"] == 69.4
    assert report["best_config"]
    assert report["seed"] == 7
    assert len(report["evidence"]["results"]) == 11
    assert report["estimate_spread_db"] <= 0.8


def test_probe_missing_curves_is_config_error(tmp_path):
    assert run(["probe", "--scenario", SCENARIOS / "LH-1016.json",
                "--curves", tmp_path / "nope", "--out", tmp_path]) == 3


def test_probe_invalid_scenario_exit_4(tmp_path, curves_dir):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "name": "x"}))
    assert run(["probe", "--scenario", bad, "--curves", curves_dir,
                "--out", tmp_path]) == 4


def test_probe_no_signal_exit_2(tmp_path, curves_dir):
    # an absurdly long link: every configuration sees post-FEC errors
    scenario = json.loads((SCENARIOS / "B-621.json").read_text())
    for span in scenario["spans"]:
        span["loss_db"] = span["amp_gain_db"] = 30.0
    dead = tmp_path / "dead.json"
    dead.write_text(json.dumps(scenario))
    assert run(["probe", "--scenario", dead, "--curves", curves_dir,
                "--out", tmp_path]) == 2


def test_missing_scenario_flag_is_config_error(curves_dir):
    assert run(["probe", "--curves", curves_dir]) == 3


def test_probe_deterministic_bytes(tmp_path, curves_dir):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert run(["probe", "--scenario", SCENARIOS / "B-485.json",
                    "--curves", curves_dir, "--seed", 42, "--out", out]) == 0
    assert (out1 / "B-485-report.json").read_bytes() == \
        (out2 / "B-485-report.json").read_bytes()


def test_seed_env_fallback(tmp_path, curves_dir, monkeypatch):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    monkeypatch.setenv("OSAAS_PROBE_SEED", "99")
    assert run(["probe", "--scenario", SCENARIOS / "B-485.json",
                "--curves", curves_dir, "--out", out1]) == 0
    report = json.loads((out1 / "B-485-report.json").read_text())
    assert report["seed"] == 99
    monkeypatch.setenv("OSAAS_PROBE_SEED", "not-a-number")
    assert run(["probe", "--scenario", SCENARIOS / "B-485.json",
                "--curves", curves_dir, "--out", out2]) == 3


def test_sweep_command(tmp_path, curves_dir):
    out = tmp_path / "out"
    code = run(["sweep", "--scenario", SCENARIOS / "C-284-sweep.json",
                "--curves", curves_dir, "--out", out,
                "--configs", "DP-QPSK-69.4,DP-P-16QAM-46.3,DP-16QAM-34.5"])
    assert code == 0
    csv_text = (out / "C-284-sweep-profile.csv").read_text()
    assert csv_text.splitlines()[0] == "freq_thz,config_id,gsnr_db"
    assert "OUTAGE" in csv_text
    summary = json.loads((out / "C-284-sweep-sweep-summary.json").read_text())
    assert abs(summary["misalignment_ghz"] - 6.25) <= 3.13
    assert not summary["misalignment_indeterminate"]


def test_sweep_bad_step_is_invalid_scenario(tmp_path, curves_dir):
    assert run(["sweep", "--scenario", SCENARIOS / "LH-1792.json",
                "--curves", curves_dir, "--out", tmp_path,
                "--step-ghz", "7.3"]) == 4


def test_sweep_unknown_config_is_config_error(tmp_path, curves_dir):
    assert run(["sweep", "--scenario", SCENARIOS / "LH-1792.json",
                "--curves", curves_dir, "--out", tmp_path,
                "--configs", "DP-QPSK-11.1"]) == 3


def test_regime_command(tmp_path, curves_dir):
    out = tmp_path / "out"
    assert run(["regime", "--scenario", SCENARIOS / "LH-5738.json",
                "--curves", curves_dir, "--out", out]) == 0
    report = json.loads((out / "LH-5738-regime.json").read_text())
    assert report["entries"]["DP-QPSK-31.5"]["classification"] == "nonlinear"
    assert report["entries"]["DP-QPSK-69.4"]["classification"] == "near_optimum"


def test_throughput_command(tmp_path, curves_dir):
    out = tmp_path / "out"
    assert run(["throughput",
                "--scenario", SCENARIOS / "B-621.json",
                "--scenario", SCENARIOS / "B-1302.json",
                "--curves", curves_dir, "--out", out]) == 0
    report = json.loads((out / "throughput.json").read_text())
    by_name = {e["scenario"]: e for e in report["links"]}
    assert by_name["B-621"]["gain_percent"] == 100.0
    for entry in report["links"]:
        assert entry["potential_gbps"] >= entry["achievable_gbps"]
        assert entry["c_band_40ch_gain_gbps"] == pytest.approx(
            40.0 * (entry["potential_gbps"] - entry["achievable_gbps"]))
    assert "what-if" in report["note"]


def test_monitor_command(tmp_path, curves_dir):
    out = tmp_path / "out"
    assert run(["monitor", "--scenario",
                SCENARIOS / "LH-3751-monitor-summer.json",
                "--curves", curves_dir, "--out", out,
                "--duration-h", 48, "--interval-h", 1]) == 0
    summary = json.loads(
        (out / "LH-3751-monitor-summer-monitor-summary.json").read_text())
    assert abs(summary["peak_to_peak_db"] - 1.5) <= 0.1
    assert summary["upgrade"]["window_h"]
    csv_text = (out / "LH-3751-monitor-summer-monitor.csv").read_text()
    assert csv_text.splitlines()[0] == "sim_time_h,gsnr_est_db"
    assert len(csv_text.splitlines()) == 50


def test_monitor_bad_interval(tmp_path, curves_dir):
    assert run(["monitor", "--scenario",
                SCENARIOS / "LH-3751-monitor-summer.json",
                "--curves", curves_dir, "--out", tmp_path,
                "--interval-h", 0]) == 3


def test_all_commands_deterministic(tmp_path, curves_dir):
    """Same seed, same bytes, for every report-producing command."""
    specs = [
        (["probe", "--scenario", SCENARIOS / "A-144.json"],
         ["A-144-report.json"]),
        (["sweep", "--scenario", SCENARIOS / "A-241-sweep.json",
          "--configs", "DP-16QAM-34.5,DP-P-16QAM-46.3"],
         ["A-241-sweep-profile.csv", "A-241-sweep-sweep-summary.json"]),
        (["regime", "--scenario", SCENARIOS / "A-144.json"],
         ["A-144-regime.json"]),
        (["monitor", "--scenario", SCENARIOS / "LH-3751-monitor-winter.json",
          "--duration-h", 24],
         ["LH-3751-monitor-winter-monitor.csv",
          "LH-3751-monitor-winter-monitor-summary.json"]),
        (["throughput", "--scenario", SCENARIOS / "B-822.json"],
         ["throughput.json"]),
    ]
    for args, outputs in specs:
        runs = []
        for sub in ("r1", "r2"):
            out = tmp_path / sub
            assert run(args + ["--curves", curves_dir, "--seed", 7,
                               "--out", out]) == 0
            runs.append([(out / name).read_bytes() for name in outputs])
        assert runs[0] == runs[1], args[0]
