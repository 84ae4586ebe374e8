"""Render sweep results to PNG files next to the CSV output.

The report path is optional: the CSV stays the authoritative artifact
and figures are drawn from the same rows.  One correlation figure is
written per spin pair (discord, classical correlation and concurrence
against the swept parameter), plus one occupation figure and one gap
figure when those columns are present.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only; no display needed
import matplotlib.pyplot as plt

from .errors import ConfigError

__all__ = ["load_rows", "render_sweep_figures"]


def load_rows(csv_path: "str | Path") -> list[dict]:
    """Read a sweep CSV back into dictionaries with numeric values."""
    rows = []
    with Path(csv_path).open(newline="") as handle:
        for record in csv.DictReader(handle):
            row = {}
            for key, value in record.items():
                row[key] = value if key == "pair" else float(value)
            rows.append(row)
    if not rows:
        raise ConfigError(f"no data rows in {csv_path}")
    return rows


def _sweep_axis(rows: list[dict]) -> str:
    h_varies = len({row["h"] for row in rows}) > 1
    k_varies = len({row["k"] for row in rows}) > 1
    if h_varies and k_varies:
        raise ConfigError("cannot plot a sweep where both h and k vary")
    return "h" if h_varies else "k"


def render_sweep_figures(
    rows: list[dict], out_dir: "str | Path", stem: str
) -> list[Path]:
    """Write the figures for one sweep; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    axis = _sweep_axis(rows)
    label = "magnetic field h" if axis == "h" else "three-spin interaction k"
    written: list[Path] = []

    pairs = sorted({row["pair"] for row in rows})
    for pair in pairs:
        subset = sorted((r for r in rows if r["pair"] == pair), key=lambda r: r[axis])
        x = [r[axis] for r in subset]
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(x, [r["discord"] for r in subset], color="green", label="discord")
        ax.plot(
            x,
            [r["classical_correlation"] for r in subset],
            color="tab:blue",
            linestyle=":",
            label="classical correlation",
        )
        ax.plot(
            x,
            [r["concurrence"] for r in subset],
            color="red",
            linestyle="--",
            label="concurrence",
        )
        ax.set_xlabel(label)
        ax.set_ylabel("correlation")
        ax.set_title(f"spin pair {pair}")
        ax.legend(frameon=False)
        path = out_dir / f"{stem}_pair{pair}_correlations.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    first_pair = pairs[0]
    subset = sorted((r for r in rows if r["pair"] == first_pair), key=lambda r: r[axis])
    x = [r[axis] for r in subset]
    if "P1" in rows[0]:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for level in range(1, 9):
            ax.plot(x, [r[f"P{level}"] for r in subset], label=f"P{level}")
        ax.set_xlabel(label)
        ax.set_ylabel("occupation probability")
        ax.legend(frameon=False, ncol=2, fontsize=8)
        path = out_dir / f"{stem}_occupations.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    if "gap_35" in rows[0]:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(x, [r["gap_35"] for r in subset], color="black")
        ax.set_xlabel(label)
        ax.set_ylabel("level 3 - level 5 gap")
        path = out_dir / f"{stem}_gap.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written
