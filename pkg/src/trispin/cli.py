"""Command-line interface.

Subcommands:

  spectrum    eigenvalues, mixing coefficients, transition frequencies
  steady      steady-state correlation record at one parameter point
  evolve      write a relaxation trajectory CSV
  sweep       run a grid sweep from a config file or bundled preset
  purestate   correlations of the symmetric one-flip eigenstate
  discord     evaluate the measures on a user-supplied 4x4 state
  plot        render figures from an existing sweep CSV

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import sweep as sweep_mod
from .correlations import (
    correlation_record,
    partial_trace,
    pure_state_pair_correlations,
)
from .errors import ConfigError, InvalidParameterError, TrispinError
from .lindblad import (
    BathSpec,
    build_jump_operators,
    evolve_rk4,
    occupation_probabilities,
)
from .spectrum import (
    ChainParams,
    analytic_eigensystem,
    energy_gap_35,
    transition_frequencies,
)

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _add_bath_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-mean", type=float, help="mean bath temperature T_M")
    parser.add_argument("--delta-t", type=float, help="temperature difference T1 - T3")
    parser.add_argument("--t1", type=float, help="temperature of the bath on spin 1")
    parser.add_argument("--t3", type=float, help="temperature of the bath on spin 3")
    parser.add_argument("--gamma", type=float, default=0.01, help="flat decay rate")


def _resolve_baths(args) -> BathSpec:
    mean_given = args.t_mean is not None or args.delta_t is not None
    raw_given = args.t1 is not None or args.t3 is not None
    if mean_given == raw_given:
        raise _UsageError("give exactly one of (--t-mean, --delta-t) or (--t1, --t3)")
    if mean_given:
        if args.t_mean is None or args.delta_t is None:
            raise _UsageError("--t-mean and --delta-t must be given together")
        t1 = args.t_mean + 0.5 * args.delta_t
        t3 = args.t_mean - 0.5 * args.delta_t
        if t1 <= 0 or t3 <= 0:
            raise _UsageError(f"derived temperatures must be positive: T1={t1:g}, T3={t3:g}")
    else:
        if args.t1 is None or args.t3 is None:
            raise _UsageError("--t1 and --t3 must be given together")
        t1, t3 = args.t1, args.t3
    try:
        return BathSpec(t1=t1, t3=t3, gamma=args.gamma)
    except InvalidParameterError as exc:
        raise _UsageError(str(exc)) from exc


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _record_payload(record) -> dict:
    return {
        "discord": record.discord,
        "classical_correlation": record.classical_correlation,
        "mutual_information": record.mutual_information,
        "concurrence": record.concurrence,
        "theta_opt": record.theta_opt,
        "phi_opt": record.phi_opt,
    }


def _cmd_spectrum(args) -> int:
    params = ChainParams(h=args.h, k=args.k, J=args.j)
    spectrum = analytic_eigensystem(params)
    w1, w2, w3 = transition_frequencies(params)
    payload = {f"epsilon_{l}": float(spectrum.energies[l - 1]) for l in range(1, 9)}
    payload.update(
        {
            "B": spectrum.angles.b,
            "sin_alpha1": spectrum.angles.sin_a1,
            "cos_alpha1": spectrum.angles.cos_a1,
            "sin_alpha2": spectrum.angles.sin_a2,
            "cos_alpha2": spectrum.angles.cos_a2,
            "omega_1": w1,
            "omega_2": w2,
            "omega_3": w3,
            "gap_35": energy_gap_35(params),
        }
    )
    _print_json(payload)
    return 0


def _cmd_steady(args) -> int:
    baths = _resolve_baths(args)
    config = sweep_mod.SweepConfig(
        h_values=(args.h,),
        k_values=(args.k,),
        t1=baths.t1,
        t3=baths.t3,
        gamma=args.gamma,
        pairs=tuple(args.pair.split(",")),
        method=args.method,
        jump_mode=args.jump_mode,
    )
    rows = sweep_mod.evaluate_point(args.h, args.k, config)
    payload = {}
    for row in rows:
        payload[row.pair] = {
            "h": row.h,
            "k": row.k,
            "gamma": row.gamma,
            "T1": row.t1,
            "T3": row.t3,
            "discord": row.discord,
            "classical_correlation": row.classical_correlation,
            "mutual_information": row.mutual_information,
            "concurrence": row.concurrence,
            "occupations": list(row.occupations),
            "gap_35": row.gap_35,
            "residual_norm": row.residual_norm,
        }
    _print_json(payload)
    return 0


def _cmd_evolve(args) -> int:
    baths = _resolve_baths(args)
    params = ChainParams(h=args.h, k=args.k)
    spectrum = analytic_eigensystem(params)
    ops = build_jump_operators(spectrum, mode=args.jump_mode)
    if args.initial == "mixed":
        rho0 = np.eye(8, dtype=complex) / 8.0
    else:  # the |000> basis state
        rho0 = np.zeros((8, 8), dtype=complex)
        rho0[0, 0] = 1.0
    trajectory = evolve_rk4(
        rho0,
        params,
        baths,
        ops=ops,
        dt=args.dt,
        steps=args.steps,
        sample_every=args.sample_every,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as handle:
        header = ["t"] + [f"P{l}" for l in range(1, 9)] + ["trace", "min_eigenvalue"]
        handle.write(",".join(header) + "\n")
        for t, rho in trajectory:
            occ = occupation_probabilities(rho, spectrum)
            cells = [f"{t:.12g}"]
            cells += [f"{p:.12g}" for p in occ]
            cells.append(f"{rho.trace().real:.12g}")
            cells.append(f"{np.linalg.eigvalsh(rho)[0]:.12g}")
            handle.write(",".join(cells) + "\n")
    print(f"wrote {len(trajectory)} samples to {out}")
    return 0


def preset_names() -> list[str]:
    root = resources.files("trispin").joinpath("presets")
    return sorted(path.name[: -len(".cfg")] for path in root.iterdir() if path.name.endswith(".cfg"))


def load_preset(name: str) -> str:
    path = resources.files("trispin").joinpath("presets", f"{name}.cfg")
    if not path.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        )
    return path.read_text()


def _apply_overrides(text: str, overrides: list[str]) -> str:
    """Replace or append ``key=value`` entries in config text."""
    parsed = []
    for override in overrides:
        if "=" not in override:
            raise _UsageError(f"--set expects key=value, got {override!r}")
        key, value = (part.strip() for part in override.split("=", 1))
        parsed.append((key, value))
    keys = {key for key, _ in parsed}
    kept = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        if "=" in body and body.split("=", 1)[0].strip() in keys:
            continue
        kept.append(line)
    kept.extend(f"{key} = {value}" for key, value in parsed)
    return "\n".join(kept)


def _cmd_sweep(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise _UsageError("give exactly one of --config or --preset")
    if args.config is not None:
        config_path = Path(args.config)
        if not config_path.is_file():
            raise _UsageError(f"config file not found: {config_path}")
        text = config_path.read_text()
    else:
        text = load_preset(args.preset)
    if args.set:
        text = _apply_overrides(text, args.set)
    config = sweep_mod.parse_config(text)
    out = Path(args.out)
    rows, errors = sweep_mod.run_sweep(config, out_path=out)
    print(f"wrote {len(rows)} rows to {out}")
    if errors:
        print(f"{len(errors)} grid points failed; see {out}.errors.csv", file=sys.stderr)
    if args.plot:
        from .plotting import load_rows, render_sweep_figures

        written = render_sweep_figures(load_rows(out), out.parent, out.stem)
        for path in written:
            print(f"wrote {path}")
    return 0


def _cmd_purestate(args) -> int:
    record = pure_state_pair_correlations(args.k, args.pair)
    payload = {"k": args.k, "pair": args.pair}
    payload.update(_record_payload(record))
    _print_json(payload)
    return 0


def _load_state_file(path: Path) -> np.ndarray:
    if not path.is_file():
        raise _UsageError(f"state file not found: {path}")
    if path.suffix == ".npy":
        return np.load(path)
    try:
        data = json.loads(path.read_text())
        if isinstance(data, dict):
            if "re" not in data:
                raise _UsageError(f"state object in {path} needs a 're' matrix")
            real = np.asarray(data["re"], dtype=float)
            imag = np.asarray(data.get("im", np.zeros_like(real)), dtype=float)
            return real + 1j * imag
        arr = np.asarray(data, dtype=float)
        if arr.ndim == 3 and arr.shape[-1] == 2:  # entries as [re, im] pairs
            return arr[..., 0] + 1j * arr[..., 1]
        return arr.astype(complex)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise _UsageError(f"cannot parse state file {path}: {exc}") from exc


def _cmd_discord(args) -> int:
    rho = _load_state_file(Path(args.state_file))
    record = correlation_record(rho, measured=args.measure_side)
    payload = {"state_file": str(args.state_file), "measured_side": args.measure_side}
    payload.update(_record_payload(record))
    _print_json(payload)
    return 0


def _cmd_plot(args) -> int:
    from .plotting import load_rows, render_sweep_figures

    csv_path = Path(args.csv)
    if not csv_path.is_file():
        raise _UsageError(f"CSV file not found: {csv_path}")
    out_dir = Path(args.out_dir) if args.out_dir else csv_path.parent
    written = render_sweep_figures(load_rows(csv_path), out_dir, csv_path.stem)
    for path in written:
        print(f"wrote {path}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="trispin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="print the eigensystem summary as JSON")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--j", type=float, default=1.0, help="exchange coupling (default 1)")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("steady", help="steady-state correlations at one point")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    _add_bath_arguments(p)
    p.add_argument("--pair", default="13,23", help="comma-separated pair labels")
    p.add_argument("--method", choices=("nullspace", "rk4"), default="nullspace")
    p.add_argument("--jump-mode", choices=("generic", "analytic"), default="generic")
    p.set_defaults(func=_cmd_steady)

    p = sub.add_parser("evolve", help="write a relaxation trajectory CSV")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    _add_bath_arguments(p)
    p.add_argument("--initial", choices=("mixed", "000"), default="mixed")
    p.add_argument("--dt", type=float, default=None, help="step (default from stability)")
    p.add_argument("--steps", type=int, default=100000)
    p.add_argument("--sample-every", type=int, default=1000)
    p.add_argument("--jump-mode", choices=("generic", "analytic"), default="generic")
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p.add_argument("--config", help="sweep config file")
    p.add_argument("--preset", help="bundled preset name")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override or add a config entry (repeatable)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plot", action="store_true", help="render PNG figures next to the CSV")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("purestate", help="correlations of the symmetric one-flip state")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--pair", default="13")
    p.set_defaults(func=_cmd_purestate)

    p = sub.add_parser("discord", help="evaluate measures on a 4x4 state file")
    p.add_argument("--state-file", required=True, help=".json or .npy density matrix")
    p.add_argument("--measure-side", choices=("A", "B"), default="B")
    p.set_defaults(func=_cmd_discord)

    p = sub.add_parser("plot", help="render figures from a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_plot)

    return parser


def cli_main(argv: "list[str] | None" = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrispinError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
