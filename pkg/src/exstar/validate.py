"""Randomized invariant suite, runnable from the CLI.

Each check draws a handful of small networks (seeded, so results are
reproducible), evolves them, and asserts the structural invariants of the
dynamics: dissipative spectrum, conjugate-closed eigenvalues, Hermitian and
positive states, monotone traces and absorption curves, the star/chain
equivalence without dephasing, and full-vs-reduced agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .liouville import build_liouvillian, diagonalize, evolve, survival_function
from .networks import NetworkSpec, build_hamiltonian, initial_state, star_to_chain
from .observables import absorption_curve, default_time_grid
from .reduced import build_reduced_generator, evolve_reduced

__all__ = ["CheckResult", "run_all_checks", "CHECKS"]

SEED = 20240817


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_specs(rng: np.random.Generator, count: int, kinds=("star", "chain")):
    for _ in range(count):
        yield NetworkSpec(
            kind=str(rng.choice(kinds)),
            n_branches=int(rng.integers(3, 6)),
            length=int(rng.integers(2, 5)),
            defect=float(rng.uniform(0.0, 3.0)),
            trap_rate=float(rng.uniform(0.02, 0.5)),
        )


def _random_gamma(rng: np.random.Generator) -> float:
    return float(rng.choice([0.0, 0.05, 0.5, 5.0]))


def check_spectrum_dissipative() -> CheckResult:
    """No Liouvillian mode may grow: Re(eigenvalue) <= 1e-10."""
    rng = np.random.default_rng(SEED)
    worst = -np.inf
    for spec in _random_specs(rng, 8):
        prop = diagonalize(build_liouvillian(build_hamiltonian(spec), _random_gamma(rng)))
        worst = max(worst, float(prop.eigenvalues.real.max()))
    return CheckResult(
        "liouvillian-spectrum-dissipative", worst <= 1e-10, f"max Re(eig) = {worst:.3e}"
    )


def check_spectrum_conjugate_closed() -> CheckResult:
    """Hermiticity preservation: eigenvalue multiset closed under conjugation."""
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for spec in _random_specs(rng, 8):
        eig = diagonalize(
            build_liouvillian(build_hamiltonian(spec), _random_gamma(rng))
        ).eigenvalues
        a = np.sort_complex(np.round(eig, 9))
        b = np.sort_complex(np.round(eig.conj(), 9))
        worst = max(worst, float(np.abs(a - b).max()))
    return CheckResult(
        "liouvillian-spectrum-conjugate-pairs", worst <= 1e-8, f"max pairing gap = {worst:.3e}"
    )


def check_state_hermitian_positive() -> CheckResult:
    """Evolved states stay Hermitian with eigenvalues >= -1e-8."""
    rng = np.random.default_rng(SEED + 2)
    worst_h, worst_p = 0.0, 0.0
    for spec in _random_specs(rng, 6):
        gamma = _random_gamma(rng)
        prop = diagonalize(build_liouvillian(build_hamiltonian(spec), gamma))
        times = np.linspace(0.0, 5.0 * spec.total_sites / max(spec.trap_rate, 0.05), 40)
        for state in evolve(prop, initial_state(spec), times):
            m = state.matrix
            worst_h = max(worst_h, float(np.abs(m - m.conj().T).max()))
            worst_p = max(worst_p, -float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()))
    ok = worst_h <= 1e-10 and worst_p <= 1e-8
    return CheckResult(
        "state-hermitian-positive",
        ok,
        f"max Hermiticity dev = {worst_h:.3e}, worst negative population = {worst_p:.3e}",
    )


def check_trace_monotone() -> CheckResult:
    """With a trap, Tr rho(t) never increases (tolerance 1e-8)."""
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for spec in _random_specs(rng, 6):
        prop = diagonalize(build_liouvillian(build_hamiltonian(spec), _random_gamma(rng)))
        alive = survival_function(prop, initial_state(spec)).real(
            np.linspace(0.0, 10.0 * spec.total_sites / spec.trap_rate, 400)
        )
        worst = max(worst, float(np.diff(alive).max(initial=-np.inf)))
    return CheckResult("trace-monotone", worst <= 1e-8, f"max trace increase = {worst:.3e}")


def check_absorption_monotone() -> CheckResult:
    """P_A(t) starts at zero, stays in [0, 1], and never decreases."""
    rng = np.random.default_rng(SEED + 4)
    for spec in _random_specs(rng, 6):
        series = absorption_curve(spec, _random_gamma(rng)).series(default_time_grid(spec))
        try:
            series.check(tol=1e-8)
        except ValueError as err:
            return CheckResult("absorption-monotone", False, str(err))
    return CheckResult("absorption-monotone", True, "all sampled curves monotone in [0, 1]")


def check_isomorphism_without_dephasing() -> CheckResult:
    """Star and chain absorb identically when no dephasing acts."""
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for spec in _random_specs(rng, 5, kinds=("star",)):
        times = np.linspace(0.0, 10.0 * spec.total_sites / spec.trap_rate, 300)
        pa_star = absorption_curve(spec, 0.0, "full").p_absorbed(times)
        pa_chain = absorption_curve(star_to_chain(spec), 0.0, "full").p_absorbed(times)
        worst = max(worst, float(np.abs(pa_star - pa_chain).max()))
    return CheckResult(
        "star-chain-isomorphism", worst < 1e-7, f"max |P_A difference| = {worst:.3e}"
    )


def check_reduced_matches_full() -> CheckResult:
    """Symmetry-reduced absorption equals the full vectorized dynamics."""
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for spec in _random_specs(rng, 4, kinds=("star",)):
        gamma = _random_gamma(rng)
        times = np.linspace(0.0, 10.0 * spec.total_sites / spec.trap_rate, 200)
        pa_full = absorption_curve(spec, gamma, "full").p_absorbed(times)
        pa_red = evolve_reduced(build_reduced_generator(spec, gamma), spec, times).p_absorbed
        worst = max(worst, float(np.abs(pa_full - pa_red).max()))
    return CheckResult("reduced-matches-full", worst < 1e-8, f"max |P_A gap| = {worst:.3e}")


def check_propagator_completeness() -> CheckResult:
    """Spectral sum reconstructs the identity at t = 0."""
    rng = np.random.default_rng(SEED + 7)
    worst = 0.0
    for spec in _random_specs(rng, 5):
        prop = diagonalize(build_liouvillian(build_hamiltonian(spec), _random_gamma(rng)))
        worst = max(worst, prop.decomposition.reconstruction_error())
    return CheckResult(
        "propagator-completeness", worst <= 1e-8, f"max |V W - I| = {worst:.3e}"
    )


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_spectrum_dissipative,
    check_spectrum_conjugate_closed,
    check_state_hermitian_positive,
    check_trace_monotone,
    check_absorption_monotone,
    check_isomorphism_without_dephasing,
    check_reduced_matches_full,
    check_propagator_completeness,
)


def run_all_checks() -> list[CheckResult]:
    return [check() for check in CHECKS]
