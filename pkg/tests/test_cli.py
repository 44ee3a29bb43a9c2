"""End-to-end tests of the command-line client (in-process service)."""

import json

import numpy as np
import pytest

from zpulse.cli import main
from zpulse.io import read_pulse_csv, read_trajectory_csv

FAST_CONFIG = """
[schedule]
gate_time_ns = 30.0

[optimizer]
target_fidelity = 0.95
max_iterations = 200
restarts = 2

[run]
problem = iswap-baseline
seed = 11
"""


@pytest.fixture()
def fast_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(FAST_CONFIG)
    return cfg


def run_cli(*argv):
    return main(list(argv))


class TestOptimizeCommand:
    def test_writes_artifacts_and_exit_zero(self, fast_config, tmp_path):
        out = tmp_path / "out"
        code = run_cli("optimize", "--config", str(fast_config), "--out", str(out))
        assert code == 0
        for name in ("pulse_coarse.csv", "pulse_fine.csv", "fidelity_trace.csv", "result.json", "optimize.log"):
            assert (out / name).exists(), name
        result = json.loads((out / "result.json").read_text())
        assert result["schema"] == 1
        assert result["reached_target"] is True
        assert result["fidelity"] >= 0.95
        times, samples = read_pulse_csv(out / "pulse_coarse.csv")
        assert len(times) == 30
        assert samples.shape == (3, 30)

    def test_exit_one_when_target_missed(self, tmp_path):
        cfg = tmp_path / "hard.cfg"
        cfg.write_text(
            FAST_CONFIG.replace("target_fidelity = 0.95", "target_fidelity = 0.999999")
            .replace("max_iterations = 200", "max_iterations = 5")
            .replace("restarts = 2", "restarts = 1")
        )
        out = tmp_path / "out"
        code = run_cli("optimize", "--config", str(cfg), "--out", str(out))
        assert code == 1
        assert (out / "result.json").exists()  # artifacts written anyway
        assert json.loads((out / "result.json").read_text())["reached_target"] is False

    def test_exit_two_on_infeasible_gate_time(self, fast_config, tmp_path, capsys):
        code = run_cli(
            "optimize",
            "--config",
            str(fast_config),
            "--out",
            str(tmp_path / "o"),
            "--gate-time",
            "10",
        )
        assert code == 2

    def test_exit_two_on_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[schedule]\ngate_time_ns = nope\n")
        code = run_cli("optimize", "--config", str(cfg), "--out", str(tmp_path / "o"))
        assert code == 2

    def test_deterministic_artifacts(self, fast_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli("optimize", "--config", str(fast_config), "--out", str(out1)) == 0
        assert run_cli("optimize", "--config", str(fast_config), "--out", str(out2)) == 0
        for name in ("pulse_coarse.csv", "pulse_fine.csv", "fidelity_trace.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_env_var_out_dir(self, fast_config, tmp_path, monkeypatch):
        env_out = tmp_path / "from_env"
        monkeypatch.setenv("ZPULSE_OUT", str(env_out))
        assert run_cli("optimize", "--config", str(fast_config)) == 0
        assert (env_out / "result.json").exists()


class TestTrajectoryCommand:
    def test_roundtrip_from_optimized_pulse(self, fast_config, tmp_path):
        out = tmp_path / "out"
        assert run_cli("optimize", "--config", str(fast_config), "--out", str(out)) == 0
        code = run_cli(
            "trajectory",
            str(out / "pulse_coarse.csv"),
            "--config",
            str(fast_config),
            "--out",
            str(out),
            "--initial",
            "0|010",
            "--watch",
            "0|010,0|001",
        )
        assert code == 0
        times, cols = read_trajectory_csv(out / "trajectory.csv")
        assert len(times) == 301
        # the optimized iSWAP moves |010> to i|001>
        assert cols["p_0_001"][-1] >= 0.9
        # probabilities stay bounded
        totals = np.sum([c for c in cols.values()], axis=0)
        assert np.max(totals) <= 1.0 + 1e-9

    def test_unknown_label_exit_two(self, fast_config, tmp_path):
        out = tmp_path / "out"
        assert run_cli("optimize", "--config", str(fast_config), "--out", str(out)) == 0
        code = run_cli(
            "trajectory",
            str(out / "pulse_coarse.csv"),
            "--config",
            str(fast_config),
            "--out",
            str(out),
            "--initial",
            "7|777",
        )
        assert code == 2

    def test_missing_pulse_file_exit_two(self, fast_config, tmp_path):
        code = run_cli(
            "trajectory",
            str(tmp_path / "missing.csv"),
            "--config",
            str(fast_config),
            "--out",
            str(tmp_path),
        )
        assert code == 2


class TestSweepCommand:
    def test_degenerate_range_single_row(self, fast_config, tmp_path, capsys):
        out = tmp_path / "out"
        code = run_cli(
            "sweep",
            "--config",
            str(fast_config),
            "--out",
            str(out),
            "--t-min",
            "30",
            "--t-max",
            "30",
            "--t-step",
            "2",
        )
        assert code == 0
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "t_g_ns,best_fidelity,restarts_used,iterations_total,warm_started"
        assert len(lines) == 2
        assert "minimal feasible gate time: 30" in capsys.readouterr().out

    def test_empty_range_exit_two(self, fast_config, tmp_path):
        code = run_cli(
            "sweep",
            "--config",
            str(fast_config),
            "--out",
            str(tmp_path),
            "--t-min",
            "40",
            "--t-max",
            "30",
            "--t-step",
            "1",
        )
        assert code == 2


class TestCheckgradCommand:
    def test_passes_on_healthy_gradient(self, fast_config, tmp_path):
        code = run_cli(
            "checkgrad", "--config", str(fast_config), "--out", str(tmp_path), "--probes", "12"
        )
        assert code == 0

    def test_corrupt_adjoint_exit_one(self, fast_config, tmp_path):
        code = run_cli(
            "checkgrad",
            "--config",
            str(fast_config),
            "--out",
            str(tmp_path),
            "--probes",
            "8",
            "--corrupt-adjoint",
        )
        assert code == 1


class TestPrintCommands:
    def test_print_target(self, capsys):
        assert run_cli("print-target", "--problem", "ifredkin+") == 0
        out = capsys.readouterr().out
        assert "ifredkin+" in out
        assert "+1.0i" in out

    def test_print_config_parses(self, capsys, tmp_path):
        assert run_cli("print-config") == 0
        text = capsys.readouterr().out
        from zpulse.config import parse_config

        parse_config(text)  # must round-trip
