import json
import math

import numpy as np
import pytest

from trispin.cli import cli_main, preset_names

from oracles import werner_state


def run_cli(capsys, argv):
    code = cli_main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpectrumCommand:
    def test_eigenvalue_output(self, capsys):
        code, out, _ = run_cli(capsys, ["spectrum", "--h", "1", "--k", "2"])
        assert code == 0
        payload = json.loads(out)
        assert payload["epsilon_5"] == pytest.approx(-6.464102, abs=1e-6)
        assert payload["epsilon_1"] == pytest.approx(-3.0)
        assert payload["gap_35"] == pytest.approx(payload["epsilon_3"] - payload["epsilon_5"])

    def test_missing_argument_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, ["spectrum", "--h", "1"])
        assert code == 1
        assert "error" in err


class TestSteadyCommand:
    def test_single_point(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["steady", "--h", "3", "--k", "4", "--t-mean", "1.2", "--delta-t", "0.8"],
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"13", "23"}
        row = payload["13"]
        assert row["discord"] + row["classical_correlation"] == pytest.approx(
            row["mutual_information"], abs=1e-8
        )
        assert row["residual_norm"] < 1e-8
        assert len(row["occupations"]) == 8

    def test_temperature_scheme_required(self, capsys):
        code, _, err = run_cli(capsys, ["steady", "--h", "3", "--k", "4"])
        assert code == 1
        assert "exactly one" in err

    def test_negative_derived_temperature(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["steady", "--h", "3", "--k", "4", "--t-mean", "0.2", "--delta-t", "0.8"],
        )
        assert code == 1

    def test_numerical_failure_exit_code(self, capsys):
        h_star = str((2.0 + math.sqrt(12.0)) / 2.0)
        code, _, err = run_cli(
            capsys,
            ["steady", "--h", h_star, "--k", "2", "--t1", "1.0", "--t3", "0.8"],
        )
        assert code == 2
        assert "numerical failure" in err


class TestPurestateCommand:
    def test_weak_interaction_value(self, capsys):
        code, out, _ = run_cli(capsys, ["purestate", "--k", "0", "--pair", "13"])
        assert code == 0
        payload = json.loads(out)
        assert payload["concurrence"] == pytest.approx(0.5, abs=1e-9)


class TestDiscordCommand:
    def test_json_state_file(self, capsys, tmp_path):
        rho = werner_state(0.8)
        path = tmp_path / "werner.json"
        path.write_text(json.dumps({"re": rho.real.tolist(), "im": rho.imag.tolist()}))
        code, out, _ = run_cli(capsys, ["discord", "--state-file", str(path)])
        assert code == 0
        payload = json.loads(out)
        assert payload["concurrence"] == pytest.approx(0.7, abs=1e-9)
        assert payload["discord"] > 0.2

    def test_npy_state_file(self, capsys, tmp_path):
        path = tmp_path / "state.npy"
        np.save(path, np.eye(4, dtype=complex) / 4.0)
        code, out, _ = run_cli(capsys, ["discord", "--state-file", str(path)])
        assert code == 0
        assert json.loads(out)["discord"] == pytest.approx(0.0, abs=1e-9)

    def test_invalid_state_is_numerical_failure(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps([[1, 0, 0, 0]] * 4))
        code, _, err = run_cli(capsys, ["discord", "--state-file", str(path)])
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, ["discord", "--state-file", str(tmp_path / "no.json")])
        assert code == 1


class TestEvolveCommand:
    def test_trajectory_csv(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, stdout, _ = run_cli(
            capsys,
            [
                "evolve", "--h", "3", "--k", "4", "--t1", "1.6", "--t3", "0.8",
                "--steps", "2000", "--sample-every", "500", "--out", str(out),
            ],
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,P1,P2,P3,P4,P5,P6,P7,P8,trace,min_eigenvalue"
        assert len(lines) == 2 + 2000 // 500
        for line in lines[1:]:
            cells = [float(cell) for cell in line.split(",")]
            assert cells[9] == pytest.approx(1.0, abs=1e-10)
            assert cells[10] > -1e-8


class TestSweepCommand:
    CONFIG = (
        "h_min = 1\nh_max = 3\nh_steps = 3\nk = 2\n"
        "t_mean = 1.8\ndelta_t = 0.5\ngamma = 0.01\n"
    )

    def test_config_sweep_with_plot(self, capsys, tmp_path):
        config = tmp_path / "sweep.cfg"
        config.write_text(self.CONFIG)
        out = tmp_path / "rows.csv"
        code, stdout, _ = run_cli(
            capsys, ["sweep", "--config", str(config), "--out", str(out), "--plot"]
        )
        assert code == 0
        assert out.is_file()
        assert len(out.read_text().splitlines()) == 7
        for name in ("rows_pair13_correlations.png", "rows_pair23_correlations.png",
                     "rows_occupations.png", "rows_gap.png"):
            assert (tmp_path / name).is_file()

    def test_preset_with_overrides(self, capsys, tmp_path):
        out = tmp_path / "fig8.csv"
        code, stdout, _ = run_cli(
            capsys,
            ["sweep", "--preset", "fig8", "--set", "h_steps=6", "--set", "h_max=0.5",
             "--out", str(out)],
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 6  # six points, single pair
        assert preset_names() == ["fig2", "fig3", "fig4", "fig5", "fig6", "fig8", "fig9"]

    def test_unknown_preset(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, ["sweep", "--preset", "nope", "--out", str(tmp_path / "x.csv")]
        )
        assert code == 1
        assert "unknown preset" in err

    def test_config_and_preset_conflict(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            ["sweep", "--config", "a.cfg", "--preset", "fig2", "--out", str(tmp_path / "x.csv")],
        )
        assert code == 1

    def test_unknown_config_key_exit_code(self, capsys, tmp_path):
        config = tmp_path / "sweep.cfg"
        config.write_text(self.CONFIG + "bogus = 1\n")
        code, _, err = run_cli(
            capsys, ["sweep", "--config", str(config), "--out", str(tmp_path / "x.csv")]
        )
        assert code == 1
        assert "bogus" in err


class TestPlotCommand:
    def test_plot_from_existing_csv(self, capsys, tmp_path):
        config = tmp_path / "sweep.cfg"
        config.write_text(TestSweepCommand.CONFIG)
        out = tmp_path / "rows.csv"
        assert run_cli(capsys, ["sweep", "--config", str(config), "--out", str(out)])[0] == 0
        plot_dir = tmp_path / "figures"
        code, stdout, _ = run_cli(
            capsys, ["plot", "--csv", str(out), "--out-dir", str(plot_dir)]
        )
        assert code == 0
        assert (plot_dir / "rows_pair13_correlations.png").is_file()

    def test_missing_csv(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, ["plot", "--csv", str(tmp_path / "no.csv")])
        assert code == 1
