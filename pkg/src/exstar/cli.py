"""Command-line interface.

Subcommands
-----------
simulate        one parameter point, dumps the P_A(t) series
sweep-delta     absorption time over a defect grid
sweep-gamma     absorption time over a log-spaced dephasing grid
heatmap         speedup S(gamma) over an (L, N) grid
classical-mfpt  quantum tau against the three analytic estimates
validate        randomized invariant suite

Network parameters can come from flags or from a flat ``key = value``
config file (``--config``); flags override the file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import scan
from .networks import NetworkSpec, parse_config
from .observables import Engine, absorption_series, absorption_time, default_time_grid
from .validate import run_all_checks

SPEC_KEYS = {"kind", "N", "L", "J", "delta", "gamma_trap", "eps0"}


def _add_network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value file with any of the flags below")
    p.add_argument("--kind", choices=["star", "chain"], help="network topology")
    p.add_argument("--N", type=int, help="number of branches (feeds the chain's sqrt(N) bond)")
    p.add_argument("--L", type=int, help="branch / chain body length")
    p.add_argument("--J", type=float, help="hopping amplitude (default 1)")
    p.add_argument("--delta", type=float, help="defect energy (default 0)")
    p.add_argument("--gamma", type=float, help="dephasing rate (default 0)")
    p.add_argument("--gamma-trap", dest="gamma_trap", type=float, help="trap rate (default 0.1)")
    p.add_argument("--eps0", type=float, help="uniform site energy (default 0)")
    p.add_argument(
        "--engine",
        choices=[e.value for e in Engine],
        help="evolution backend (default auto)",
    )
    p.add_argument("--out", type=Path, help="output CSV path")


def _merged_options(args: argparse.Namespace) -> dict:
    merged: dict = {}
    if getattr(args, "config", None):
        file_pairs = parse_config(args.config.read_text())
        known = SPEC_KEYS | {"gamma", "engine", "out", "tmax", "points"}
        unknown = set(file_pairs) - known
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_pairs)
    for key in ("kind", "N", "L", "J", "delta", "gamma", "gamma_trap", "eps0", "engine", "out", "tmax", "points"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _spec_from_options(opts: dict) -> NetworkSpec:
    for key in ("kind", "N", "L"):
        if key not in opts:
            raise SystemExit(f"missing required parameter --{key} (or config key '{key}')")
    return NetworkSpec(
        kind=str(opts["kind"]),
        n_branches=int(opts["N"]),
        length=int(opts["L"]),
        hopping=float(opts.get("J", 1.0)),
        defect=float(opts.get("delta", 0.0)),
        trap_rate=float(opts.get("gamma_trap", 0.1)),
        site_energy=float(opts.get("eps0", 0.0)),
    )


def _require_out(opts: dict) -> Path:
    if "out" not in opts:
        raise SystemExit("an output path is required (--out)")
    return Path(opts["out"])


def cmd_simulate(args: argparse.Namespace) -> int:
    opts = _merged_options(args)
    spec = _spec_from_options(opts)
    gamma = float(opts.get("gamma", 0.0))
    engine = Engine(opts.get("engine", "auto"))
    if "tmax" in opts:
        times = np.linspace(0.0, float(opts["tmax"]), int(opts.get("points", 2000)))
    elif "points" in opts:
        times = np.linspace(0.0, default_time_grid(spec)[-1], int(opts["points"]))
    else:
        times = None
    series = absorption_series(spec, gamma, times, engine)
    out = _require_out(opts)
    scan.write_series(out, series.times, series.p_absorbed)
    print(f"wrote {series.times.size} samples to {out}")
    return 0


def cmd_sweep_delta(args: argparse.Namespace) -> int:
    opts = _merged_options(args)
    spec = _spec_from_options(opts)
    deltas = np.round(np.arange(args.delta_min, args.delta_max + 1e-12, args.delta_step), 10)
    job = scan.SweepJob(
        base=spec,
        dephasing=float(opts.get("gamma", 0.0)),
        axes=(("delta", tuple(float(d) for d in deltas)),),
        engine=Engine(opts.get("engine", "auto")),
        out=_require_out(opts),
    )
    rows = scan.run_sweep(job, workers=args.workers)
    print(f"wrote {len(rows)} rows to {job.out}")
    return 0


def cmd_sweep_gamma(args: argparse.Namespace) -> int:
    opts = _merged_options(args)
    spec = _spec_from_options(opts)
    gammas = np.logspace(np.log10(args.gamma_min), np.log10(args.gamma_max), args.gamma_points)
    job = scan.SweepJob(
        base=spec,
        dephasing=0.0,
        axes=(("gamma", tuple(float(g) for g in gammas)),),
        engine=Engine(opts.get("engine", "auto")),
        out=_require_out(opts),
    )
    rows = scan.run_sweep(job, workers=args.workers)
    print(f"wrote {len(rows)} rows to {job.out}")
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    opts = _merged_options(args)
    opts.setdefault("delta", 0.0)
    spec = _spec_from_options(opts)
    n_values = list(range(args.n_min, args.n_max + 1))
    l_values = list(range(args.l_min, args.l_max + 1))
    _, rows = scan.heatmap_speedup(
        spec,
        n_values,
        l_values,
        float(opts.get("gamma", 0.0)),
        engine=Engine(opts.get("engine", "auto")),
        workers=args.workers,
    )
    out = _require_out(opts)
    scan.write_rows(out, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_classical_mfpt(args: argparse.Namespace) -> int:
    opts = _merged_options(args)
    spec = _spec_from_options(opts)
    gammas = np.logspace(np.log10(args.gamma_min), np.log10(args.gamma_max), args.gamma_points)
    rows = scan.classical_comparison_rows(
        spec, [float(g) for g in gammas], engine=Engine(opts.get("engine", "auto"))
    )
    out = _require_out(opts)
    scan.write_dict_rows(
        out, rows, ("gamma", "tau_quantum", "tau_closed_form", "tau_inverse", "tau_wtd")
    )
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_validate(_args: argparse.Namespace) -> int:
    results = run_all_checks()
    failures = 0
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"[{mark}] {res.name}: {res.detail}")
        failures += 0 if res.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exstar",
        description="Exciton absorption on extended stars and asymmetric chains under dephasing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="dump P_A(t) for one parameter point")
    _add_network_args(p)
    p.add_argument("--tmax", type=float, help="time horizon (default 10*N_S/gamma_trap)")
    p.add_argument("--points", type=int, help="number of grid points (default 2000)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep-delta", help="absorption time over a defect grid")
    _add_network_args(p)
    p.add_argument("--delta-min", type=float, default=0.0)
    p.add_argument("--delta-max", type=float, default=4.0)
    p.add_argument("--delta-step", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep_delta)

    p = sub.add_parser("sweep-gamma", help="absorption time over a dephasing grid")
    _add_network_args(p)
    p.add_argument("--gamma-min", type=float, default=0.01)
    p.add_argument("--gamma-max", type=float, default=100.0)
    p.add_argument("--gamma-points", type=int, default=25)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep_gamma)

    p = sub.add_parser("heatmap", help="speedup S(gamma) over an (L, N) grid")
    _add_network_args(p)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--l-min", type=int, default=2)
    p.add_argument("--l-max", type=int, default=14)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("classical-mfpt", help="quantum tau vs analytic estimates")
    _add_network_args(p)
    p.add_argument("--gamma-min", type=float, default=0.01)
    p.add_argument("--gamma-max", type=float, default=100.0)
    p.add_argument("--gamma-points", type=int, default=25)
    p.set_defaults(func=cmd_classical_mfpt)

    p = sub.add_parser("validate", help="run the randomized invariant suite")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
