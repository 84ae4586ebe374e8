import math

import pytest

from trispin import ChainParams, ConfigError, build_hamiltonian, partial_trace
from trispin.correlations import correlation_record
from trispin.sweep import SweepConfig, parse_config, run_sweep

from oracles import gibbs_state

VALID_TEXT = """
h_min = 0
h_max = 10
h_steps = 101
k = 2
t_mean = 1.8
delta_t = 0.5
gamma = 0.01
"""


class TestParseConfig:
    def test_valid_example(self):
        config = parse_config(VALID_TEXT)
        assert config.t1 == pytest.approx(2.05)
        assert config.t3 == pytest.approx(1.55)
        assert len(config.h_values) == 101
        assert config.k_values == (2.0,)
        assert config.pairs == ("13", "23")
        assert config.method == "nullspace"

    def test_negative_derived_temperature(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_config("h = 1\nk = 1\nt_mean = 0.2\ndelta_t = 0.8\n")

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config(VALID_TEXT + "bogus = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("h = 1\nh = 2\nk = 1\nt1 = 1\nt3 = 1\n")

    def test_both_temperature_schemes_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config("h = 1\nk = 1\nt_mean = 1\ndelta_t = 0.2\nt1 = 1\nt3 = 1\n")
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config("h = 1\nk = 1\n")

    def test_grid_shorthand_conflicts(self):
        with pytest.raises(ConfigError, match="not both"):
            parse_config("h = 1\nh_min = 0\nh_max = 2\nh_steps = 3\nk = 1\nt1 = 1\nt3 = 1\n")

    def test_single_step_grid_needs_equal_bounds(self):
        with pytest.raises(ConfigError, match="requires"):
            parse_config("h_min = 0\nh_max = 2\nh_steps = 1\nk = 1\nt1 = 1\nt3 = 1\n")

    def test_comments_and_blank_lines(self):
        config = parse_config("# comment\n\nh = 1 # trailing\nk = 2\nt1 = 1.0\nt3 = 0.5\n")
        assert config.h_values == (1.0,)
        assert config.t3 == 0.5

    def test_bad_pair_label(self):
        with pytest.raises(Exception):
            parse_config("h = 1\nk = 1\nt1 = 1\nt3 = 1\npairs = 14\n")


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    config = parse_config(
        "h_min = 1\nh_max = 3\nh_steps = 3\nk = 2\nt_mean = 1.8\ndelta_t = 0.5\ngamma = 0.01\n"
    )
    out = tmp_path_factory.mktemp("sweep") / "rows.csv"
    rows, errors = run_sweep(config, out_path=out)
    return config, rows, errors, out


class TestRunSweep:
    def test_row_count_and_order(self, small_sweep):
        config, rows, errors, out = small_sweep
        assert len(rows) == 6
        assert not errors
        keys = [(row.h, row.k, row.pair) for row in rows]
        assert keys == sorted(keys)

    def test_csv_layout(self, small_sweep):
        config, rows, errors, out = small_sweep
        lines = out.read_text().splitlines()
        assert len(lines) == 7
        header = lines[0].split(",")
        assert header[:6] == ["h", "k", "gamma", "T1", "T3", "pair"]
        assert "P1" in header and "P8" in header and "gap_35" in header
        assert header[-1] == "residual_norm"

    def test_rows_satisfy_invariants(self, small_sweep):
        config, rows, errors, out = small_sweep
        for row in rows:
            assert row.discord > -1e-9
            assert row.classical_correlation > -1e-9
            assert abs(
                row.discord + row.classical_correlation - row.mutual_information
            ) < 1e-8
            assert 0.0 <= row.concurrence <= 1.0
            assert abs(sum(row.occupations) - 1.0) < 1e-8
            assert row.residual_norm < 1e-8

    def test_deterministic_output(self, small_sweep, tmp_path):
        config, rows, errors, out = small_sweep
        again = tmp_path / "again.csv"
        run_sweep(config, out_path=again)
        assert again.read_bytes() == out.read_bytes()

    def test_meta_sidecar(self, small_sweep):
        config, rows, errors, out = small_sweep
        meta = out.with_suffix(out.suffix + ".meta.json")
        assert meta.is_file()
        assert '"measured_side"' in meta.read_text()

    def test_failed_points_go_to_sidecar(self, tmp_path):
        # the middle point sits exactly on the level crossing 2h = k + B
        h_star = (2.0 + math.sqrt(12.0)) / 2.0
        config = SweepConfig(
            h_values=(1.0, h_star, 4.0),
            k_values=(2.0,),
            t1=2.05,
            t3=1.55,
            gamma=0.01,
        )
        out = tmp_path / "rows.csv"
        rows, errors = run_sweep(config, out_path=out)
        assert len(rows) == 4
        assert len(errors) == 1
        assert errors[0][0] == pytest.approx(h_star)
        assert errors[0][2] == "*"
        sidecar = out.with_suffix(out.suffix + ".errors.csv")
        assert sidecar.is_file()
        assert "degenerate" in sidecar.read_text()

    def test_pairs_are_sorted_in_output(self):
        config = SweepConfig(
            h_values=(1.0,), k_values=(2.0,), t1=1.0, t3=0.8, pairs=("23", "13")
        )
        rows, errors = run_sweep(config)
        assert [row.pair for row in rows] == ["13", "23"]

    def test_single_point_equal_temperatures_matches_gibbs(self):
        config = SweepConfig(h_values=(1.0,), k_values=(2.0,), t1=1.5, t3=1.5, pairs=("13",))
        rows, _ = run_sweep(config)
        gibbs = gibbs_state(build_hamiltonian(ChainParams(h=1.0, k=2.0)), 1.5)
        record = correlation_record(partial_trace(gibbs, "13"))
        assert rows[0].discord == pytest.approx(record.discord, abs=1e-8)
        assert rows[0].concurrence == pytest.approx(record.concurrence, abs=1e-8)
        assert rows[0].mutual_information == pytest.approx(record.mutual_information, abs=1e-8)

    def test_emit_flags_drop_columns(self, tmp_path):
        config = SweepConfig(
            h_values=(1.0,),
            k_values=(2.0,),
            t1=1.5,
            t3=1.2,
            emit_occupations=False,
            emit_gap=False,
        )
        out = tmp_path / "lean.csv"
        run_sweep(config, out_path=out)
        header = out.read_text().splitlines()[0].split(",")
        assert "P1" not in header and "gap_35" not in header

    def test_csv_digits_env_override(self, tmp_path, monkeypatch):
        config = SweepConfig(h_values=(1.0,), k_values=(2.0,), t1=1.5, t3=1.2, pairs=("13",))
        monkeypatch.setenv("TRISPIN_CSV_DIGITS", "4")
        out = tmp_path / "short.csv"
        run_sweep(config, out_path=out)
        data_line = out.read_text().splitlines()[1]
        discord_cell = data_line.split(",")[6]
        assert len(discord_cell.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) <= 6
        monkeypatch.setenv("TRISPIN_CSV_DIGITS", "40")
        with pytest.raises(ConfigError):
            run_sweep(config, out_path=out)
