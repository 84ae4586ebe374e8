"""Parameter-sweep harness with a deterministic delimited output.

A sweep walks a rectangular (h, k) grid, solves the steady state at
each point, reduces it to the requested spin pairs and writes one CSV
row per (point, pair).  Rows are emitted in lexicographic (h, k, pair)
order and floats are printed with a fixed number of significant
digits (12 by default, overridable through the TRISPIN_CSV_DIGITS
environment variable), so two runs of the same configuration produce
byte-identical CSV bodies.

Points where the solver fails (for example on a level crossing where
a transition frequency vanishes) are recorded in an errors sidecar
file next to the output, and the run continues.

Configurations are plain ``key = value`` text with ``#`` comments:

    h_min = 0        # or the shorthand  h = 2  for a fixed value
    h_max = 10
    h_steps = 101
    k = 2
    t_mean = 1.8     # with delta_t, or give t1 and t3 directly
    delta_t = 0.5
    gamma = 0.01
    pairs = 13,23
    method = nullspace        # or rk4
    jump_mode = generic       # or analytic
    emit_occupations = true
    emit_gap = true
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlations import SpinPair, correlation_record, partial_trace
from .errors import ConfigError, TrispinError
from .lindblad import (
    BathSpec,
    build_jump_operators,
    liouvillian_apply,
    occupation_probabilities,
    steady_state,
)
from .spectrum import ChainParams, analytic_eigensystem, energy_gap_35

__all__ = [
    "SweepConfig",
    "CorrelationRow",
    "parse_config",
    "evaluate_point",
    "run_sweep",
    "write_rows",
]

_GRID_KEYS = {"h", "h_min", "h_max", "h_steps", "k", "k_min", "k_max", "k_steps"}
_BATH_KEYS = {"t_mean", "delta_t", "t1", "t3", "gamma"}
_OTHER_KEYS = {"pairs", "method", "jump_mode", "emit_occupations", "emit_gap"}
_KNOWN_KEYS = _GRID_KEYS | _BATH_KEYS | _OTHER_KEYS


@dataclass(frozen=True)
class SweepConfig:
    """Resolved sweep settings: explicit grids, bath temperatures, options."""

    h_values: tuple[float, ...]
    k_values: tuple[float, ...]
    t1: float
    t3: float
    gamma: float = 0.01
    pairs: tuple[str, ...] = ("13", "23")
    method: str = "nullspace"
    jump_mode: str = "generic"
    emit_occupations: bool = True
    emit_gap: bool = True

    def __post_init__(self):
        if not self.h_values or not self.k_values:
            raise ConfigError("both h and k grids must be non-empty")
        if self.t1 <= 0 or self.t3 <= 0:
            raise ConfigError(
                f"bath temperatures must be positive, got T1={self.t1} T3={self.t3}"
            )
        if self.gamma <= 0:
            raise ConfigError("gamma must be positive")
        if self.method not in ("nullspace", "rk4"):
            raise ConfigError(f"method must be nullspace or rk4, got {self.method!r}")
        if self.jump_mode not in ("generic", "analytic"):
            raise ConfigError(f"jump_mode must be generic or analytic, got {self.jump_mode!r}")
        if not self.pairs:
            raise ConfigError("at least one spin pair is required")
        for pair in self.pairs:
            SpinPair(pair)

    @property
    def baths(self) -> BathSpec:
        return BathSpec(t1=self.t1, t3=self.t3, gamma=self.gamma)


@dataclass(frozen=True)
class CorrelationRow:
    """One output row: parameters, measures, occupations and diagnostics."""

    h: float
    k: float
    gamma: float
    t1: float
    t3: float
    pair: str
    discord: float
    classical_correlation: float
    mutual_information: float
    concurrence: float
    occupations: tuple[float, ...] = field(default=())
    gap_35: float | None = None
    residual_norm: float = 0.0


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"value of {key!r} is not a number: {value!r}") from exc


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"value of {key!r} is not a boolean: {value!r}")


def _grid(axis: str, entries: dict[str, str]) -> tuple[float, ...]:
    fixed = entries.get(axis)
    has_range = any(f"{axis}_{suffix}" in entries for suffix in ("min", "max", "steps"))
    if fixed is not None and has_range:
        raise ConfigError(f"give either {axis} or {axis}_min/{axis}_max/{axis}_steps, not both")
    if fixed is not None:
        return (_parse_float(axis, fixed),)
    if not has_range:
        raise ConfigError(f"missing grid for {axis}: set {axis} or {axis}_min/{axis}_max/{axis}_steps")
    try:
        lo = _parse_float(f"{axis}_min", entries[f"{axis}_min"])
        hi = _parse_float(f"{axis}_max", entries[f"{axis}_max"])
        steps = int(entries[f"{axis}_steps"])
    except KeyError as exc:
        raise ConfigError(f"incomplete grid for {axis}: need min, max and steps") from exc
    except ValueError as exc:
        raise ConfigError(f"{axis}_steps must be an integer") from exc
    if steps < 1:
        raise ConfigError(f"{axis}_steps must be >= 1, got {steps}")
    if lo > hi:
        raise ConfigError(f"{axis}_min must not exceed {axis}_max")
    if steps == 1:
        if lo != hi:
            raise ConfigError(f"{axis}_steps = 1 requires {axis}_min == {axis}_max")
        return (lo,)
    return tuple(float(x) for x in np.linspace(lo, hi, steps))


def parse_config(text: str) -> SweepConfig:
    """Parse ``key = value`` sweep text; unknown keys are an error."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno} is not a key = value assignment: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} on line {lineno}")
        entries[key] = value
    unknown = sorted(set(entries) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    mean_given = "t_mean" in entries or "delta_t" in entries
    raw_given = "t1" in entries or "t3" in entries
    if mean_given == raw_given:
        raise ConfigError("give exactly one of (t_mean, delta_t) or (t1, t3)")
    if mean_given:
        try:
            t_mean = _parse_float("t_mean", entries["t_mean"])
            delta_t = _parse_float("delta_t", entries["delta_t"])
        except KeyError as exc:
            raise ConfigError("t_mean and delta_t must be given together") from exc
        t1 = t_mean + 0.5 * delta_t
        t3 = t_mean - 0.5 * delta_t
        if t1 <= 0 or t3 <= 0:
            raise ConfigError(
                f"derived temperatures must be positive: T1 = {t1:g}, T3 = {t3:g}"
            )
    else:
        try:
            t1 = _parse_float("t1", entries["t1"])
            t3 = _parse_float("t3", entries["t3"])
        except KeyError as exc:
            raise ConfigError("t1 and t3 must be given together") from exc

    pairs = tuple(
        token.strip() for token in entries.get("pairs", "13,23").split(",") if token.strip()
    )
    return SweepConfig(
        h_values=_grid("h", entries),
        k_values=_grid("k", entries),
        t1=t1,
        t3=t3,
        gamma=_parse_float("gamma", entries.get("gamma", "0.01")),
        pairs=pairs,
        method=entries.get("method", "nullspace"),
        jump_mode=entries.get("jump_mode", "generic"),
        emit_occupations=_parse_bool("emit_occupations", entries.get("emit_occupations", "true")),
        emit_gap=_parse_bool("emit_gap", entries.get("emit_gap", "true")),
    )


def evaluate_point(
    h: float, k: float, config: SweepConfig
) -> list[CorrelationRow]:
    """Steady state and correlation rows for a single grid point."""
    params = ChainParams(h=h, k=k)
    spectrum = analytic_eigensystem(params)
    ops = build_jump_operators(spectrum, mode=config.jump_mode)
    baths = config.baths
    rho = steady_state(params, baths, method=config.method, ops=ops)
    residual = float(np.linalg.norm(liouvillian_apply(rho, params, baths, ops)))
    occupations = (
        tuple(float(p) for p in occupation_probabilities(rho, spectrum))
        if config.emit_occupations
        else ()
    )
    gap = energy_gap_35(params) if config.emit_gap else None
    rows = []
    for pair in sorted(config.pairs):
        record = correlation_record(partial_trace(rho, pair))
        rows.append(
            CorrelationRow(
                h=h,
                k=k,
                gamma=config.gamma,
                t1=config.t1,
                t3=config.t3,
                pair=pair,
                discord=record.discord,
                classical_correlation=record.classical_correlation,
                mutual_information=record.mutual_information,
                concurrence=record.concurrence,
                occupations=occupations,
                gap_35=gap,
                residual_norm=residual,
            )
        )
    return rows


def run_sweep(
    config: SweepConfig, out_path: "str | Path | None" = None
) -> tuple[list[CorrelationRow], list[tuple[float, float, str, str]]]:
    """Run the full grid; returns (rows, errors).

    Errors are (h, k, pair, message) tuples; the pair field is "*" when
    the whole point failed before any pair was evaluated.  With
    out_path set, rows go to that CSV file, errors (if any) to
    ``<out>.errors.csv`` and the resolved settings to ``<out>.meta.json``.
    """
    rows: list[CorrelationRow] = []
    errors: list[tuple[float, float, str, str]] = []
    for h in config.h_values:
        for k in config.k_values:
            try:
                rows.extend(evaluate_point(h, k, config))
            except TrispinError as exc:
                errors.append((h, k, "*", str(exc)))
    if out_path is not None:
        write_rows(rows, config, Path(out_path), errors)
    return rows, errors


def _csv_digits() -> int:
    raw = os.environ.get("TRISPIN_CSV_DIGITS", "12")
    try:
        digits = int(raw)
    except ValueError as exc:
        raise ConfigError(f"TRISPIN_CSV_DIGITS must be an integer, got {raw!r}") from exc
    if not 1 <= digits <= 17:
        raise ConfigError("TRISPIN_CSV_DIGITS must be between 1 and 17")
    return digits


def header_fields(config: SweepConfig) -> list[str]:
    fields = [
        "h", "k", "gamma", "T1", "T3", "pair",
        "discord", "classical_correlation", "mutual_information", "concurrence",
    ]
    if config.emit_occupations:
        fields += [f"P{l}" for l in range(1, 9)]
    if config.emit_gap:
        fields.append("gap_35")
    fields.append("residual_norm")
    return fields


def write_rows(
    rows: list[CorrelationRow],
    config: SweepConfig,
    out_path: Path,
    errors: "list[tuple[float, float, str, str]] | None" = None,
) -> None:
    """Write the CSV, the settings sidecar and, if needed, the errors sidecar."""
    digits = _csv_digits()

    def fmt(value: float) -> str:
        return f"%.{digits}g" % value

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header_fields(config))
        for row in rows:
            cells = [
                fmt(row.h), fmt(row.k), fmt(row.gamma), fmt(row.t1), fmt(row.t3),
                row.pair,
                fmt(row.discord), fmt(row.classical_correlation),
                fmt(row.mutual_information), fmt(row.concurrence),
            ]
            if config.emit_occupations:
                cells += [fmt(p) for p in row.occupations]
            if config.emit_gap:
                cells.append(fmt(row.gap_35))
            cells.append(fmt(row.residual_norm))
            writer.writerow(cells)

    meta = {
        "h_values": [float(h) for h in config.h_values],
        "k_values": [float(k) for k in config.k_values],
        "t1": config.t1,
        "t3": config.t3,
        "gamma": config.gamma,
        "pairs": list(config.pairs),
        "method": config.method,
        "jump_mode": config.jump_mode,
        "emit_occupations": config.emit_occupations,
        "emit_gap": config.emit_gap,
        "measured_side": "B (second spin of each pair)",
        "csv_digits": digits,
    }
    out_path.with_suffix(out_path.suffix + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n"
    )

    if errors:
        err_path = out_path.with_suffix(out_path.suffix + ".errors.csv")
        with err_path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["h", "k", "pair", "error"])
            for h, k, pair, message in errors:
                writer.writerow([fmt(h), fmt(k), pair, message])
