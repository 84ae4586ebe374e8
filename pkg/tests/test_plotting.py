import pytest

from trispin import ConfigError
from trispin.plotting import load_rows, render_sweep_figures


def synthetic_rows(n=5, pair="13"):
    rows = []
    for i in range(n):
        rows.append(
            {
                "h": float(i),
                "k": 2.0,
                "pair": pair,
                "discord": 0.1 * i,
                "classical_correlation": 0.05 * i,
                "mutual_information": 0.15 * i,
                "concurrence": 0.02 * i,
            }
        )
    return rows


def test_renders_minimal_columns(tmp_path):
    written = render_sweep_figures(synthetic_rows(), tmp_path, "demo")
    assert [p.name for p in written] == ["demo_pair13_correlations.png"]
    assert written[0].stat().st_size > 0


def test_rejects_two_dimensional_sweeps(tmp_path):
    rows = synthetic_rows()
    rows[0]["k"] = 3.0
    with pytest.raises(ConfigError, match="both h and k"):
        render_sweep_figures(rows, tmp_path, "demo")


def test_load_rows_requires_data(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("h,k,pair\n")
    with pytest.raises(ConfigError, match="no data rows"):
        load_rows(empty)
