"""Parameter sweeps, speedup heatmaps, and CSV persistence.

Every sweep point is an independent pure computation, so jobs run as a
parallel map; rows are always emitted in deterministic axis order and CSV
output is byte-stable for identical jobs.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classical import mfpt_closed_form, mfpt_via_inverse, mfpt_via_wtd, build_rate_model
from .networks import NetworkKind, NetworkSpec
from .observables import (
    Engine,
    HorizonExceeded,
    absorption_curve,
    absorption_time,
    absorption_time_for,
    optimal_defect,
)

__all__ = [
    "SweepJob",
    "ResultRow",
    "RESULT_FIELDS",
    "run_sweep",
    "heatmap_speedup",
    "classical_comparison_rows",
    "write_rows",
    "write_series",
]

RESULT_FIELDS = (
    "kind",
    "N",
    "L",
    "J",
    "delta",
    "gamma",
    "gamma_trap",
    "tau",
    "speedup",
    "engine",
    "converged",
)

SWEEPABLE = ("delta", "gamma", "L", "N", "gamma_trap", "J")


@dataclass(frozen=True)
class SweepJob:
    """Cartesian sweep of network/dephasing parameters.

    ``axes`` is an ordered list of ``(parameter, values)`` pairs over
    ``delta``, ``gamma``, ``L``, ``N``, ``gamma_trap`` or ``J``; rows come
    out in row-major axis order.
    """

    base: NetworkSpec
    dephasing: float
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    engine: Engine = Engine.AUTO
    out: Path | None = None

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")
        for name, values in self.axes:
            if name not in SWEEPABLE:
                raise ValueError(f"cannot sweep over {name!r}; choose from {SWEEPABLE}")
            if len(values) == 0:
                raise ValueError(f"axis {name!r} has no values")
        object.__setattr__(self, "engine", Engine(self.engine))

    def points(self) -> Iterable[tuple[NetworkSpec, float]]:
        names = [name for name, _ in self.axes]
        for combo in itertools.product(*(values for _, values in self.axes)):
            spec, gamma = self.base, self.dephasing
            for name, value in zip(names, combo):
                if name == "gamma":
                    gamma = float(value)
                elif name == "delta":
                    spec = replace(spec, defect=float(value))
                elif name == "L":
                    spec = replace(spec, length=int(value))
                elif name == "N":
                    spec = replace(spec, n_branches=int(value))
                elif name == "gamma_trap":
                    spec = replace(spec, trap_rate=float(value))
                elif name == "J":
                    spec = replace(spec, hopping=float(value))
            yield spec, gamma


@dataclass(frozen=True)
class ResultRow:
    """One sweep point; ``tau`` is NaN and ``converged`` False on failure."""

    kind: str
    N: int
    L: int
    J: float
    delta: float
    gamma: float
    gamma_trap: float
    tau: float
    speedup: float | None
    engine: str
    converged: bool

    def as_record(self) -> dict[str, str]:
        return {
            "kind": self.kind,
            "N": str(self.N),
            "L": str(self.L),
            "J": _fmt(self.J),
            "delta": _fmt(self.delta),
            "gamma": _fmt(self.gamma),
            "gamma_trap": _fmt(self.gamma_trap),
            "tau": _fmt(self.tau) if self.converged else "",
            "speedup": _fmt(self.speedup) if self.speedup is not None else "",
            "engine": self.engine,
            "converged": "true" if self.converged else "false",
        }


def _fmt(x: float) -> str:
    return repr(float(x))


def _evaluate_point(spec: NetworkSpec, gamma: float, engine: Engine) -> ResultRow:
    resolved = engine.resolve(spec)
    try:
        tau = absorption_time_for(spec, gamma, resolved).tau
        converged = True
    except HorizonExceeded:
        tau, converged = math.nan, False
    return ResultRow(
        kind=spec.kind.value,
        N=spec.n_branches,
        L=spec.length,
        J=spec.hopping,
        delta=spec.defect,
        gamma=gamma,
        gamma_trap=spec.trap_rate,
        tau=tau,
        speedup=None,
        engine=resolved.value,
        converged=converged,
    )


def run_sweep(job: SweepJob, workers: int | None = None) -> list[ResultRow]:
    """Evaluate every point of a job; failures are recorded, never raised."""
    points = list(job.points())
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    if workers <= 1 or len(points) < 2:
        rows = [_evaluate_point(spec, gamma, job.engine) for spec, gamma in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _evaluate_point(p[0], p[1], job.engine), points))
    if job.out is not None:
        write_rows(job.out, rows)
    return rows


def heatmap_speedup(
    base: NetworkSpec,
    n_values: Sequence[int],
    l_values: Sequence[int],
    dephasing: float,
    engine: Engine | str = Engine.AUTO,
    workers: int | None = None,
) -> tuple[np.ndarray, list[ResultRow]]:
    """Speedup ``S(gamma)`` on an (N, L) grid.

    Returns the matrix (rows follow ``n_values``, columns ``l_values``;
    NaN where either absorption time diverged) plus one result row per
    cell carrying ``tau(defect_opt)`` and the speedup.
    """
    engine = Engine(engine)

    def cell(n: int, l: int) -> ResultRow:
        tuned = replace(
            base, n_branches=n, length=l, defect=optimal_defect(n, base.hopping)
        )
        flat = replace(tuned, defect=0.0)
        resolved = engine.resolve(tuned)
        try:
            tau_tuned = absorption_time_for(tuned, dephasing, resolved).tau
            tau_flat = absorption_time_for(flat, dephasing, resolved).tau
            s, tau, converged = 1.0 - tau_tuned / tau_flat, tau_tuned, True
        except HorizonExceeded:
            s, tau, converged = math.nan, math.nan, False
        return ResultRow(
            kind=tuned.kind.value,
            N=n,
            L=l,
            J=tuned.hopping,
            delta=tuned.defect,
            gamma=dephasing,
            gamma_trap=tuned.trap_rate,
            tau=tau,
            speedup=s if converged else None,
            engine=resolved.value,
            converged=converged,
        )

    cells = [(n, l) for n in n_values for l in l_values]
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    if workers <= 1 or len(cells) < 2:
        rows = [cell(n, l) for n, l in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: cell(*c), cells))
    matrix = np.array([r.speedup if r.speedup is not None else math.nan for r in rows])
    return matrix.reshape(len(n_values), len(l_values)), rows


def classical_comparison_rows(
    spec: NetworkSpec,
    gammas: Sequence[float],
    engine: Engine | str = Engine.AUTO,
) -> list[dict[str, float]]:
    """Quantum tau against the three analytic estimates, per dephasing rate.

    Analytic columns are absorption times ``ln(2) * MFPT`` so they compare
    directly with the quantum half-absorption time.
    """
    ln2 = math.log(2.0)
    rows = []
    for gamma in gammas:
        model = build_rate_model(spec, gamma)
        try:
            tau_q = absorption_time_for(spec, gamma, engine).tau
        except HorizonExceeded:
            tau_q = math.nan
        rows.append(
            {
                "gamma": gamma,
                "tau_quantum": tau_q,
                "tau_closed_form": ln2 * mfpt_closed_form(spec, gamma),
                "tau_inverse": ln2 * mfpt_via_inverse(model),
                "tau_wtd": ln2 * mfpt_via_wtd(model),
            }
        )
    return rows


def write_rows(path: str | Path, rows: Sequence[ResultRow]) -> None:
    """Write sweep rows with the canonical header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.as_record())


def write_series(path: str | Path, times: np.ndarray, p_absorbed: np.ndarray) -> None:
    """Dump one P_A(t) curve as ``time,p_absorbed``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "p_absorbed"])
        for t, p in zip(times, p_absorbed):
            writer.writerow([_fmt(t), _fmt(p)])


def write_dict_rows(path: str | Path, rows: Sequence[dict], fields: Sequence[str]) -> None:
    """Write generic dict rows (used by the classical comparison dump)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) if isinstance(v, float) else v for k, v in row.items()})
