"""Strong-dephasing limit: directed-chain rate models and first-passage times.

When dephasing dominates, coherences follow the populations adiabatically and
the exciton performs a classical random walk on an effective directed chain
with three hop rates: a slow defect-detachment rate at the far end, a body
rate, and a trap-adjacent rate.  The star's merged branch generations make
its trap bond anisotropic (``N`` times faster away from the trap); the
chain's amplified bond keeps it symmetric at ``N`` times the base rate.

Absorption-time estimates come from three independent routes that must
agree: the closed-form mean first-passage time, the inverse/recurrence form
of the rate matrix, and the Laplace-domain waiting-time-distribution
recursion.  The absorption time itself is ``ln(2)`` times the MFPT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .networks import NetworkKind, NetworkSpec
from .series import ObservableSeries, Provenance
from .spectral import ExponentialSum, SpectralDecomposition

__all__ = [
    "SingularRateMatrix",
    "RecursionNonConvergent",
    "RateModel",
    "LaplaceWTD",
    "classical_rates",
    "build_rate_model",
    "evolve_rates",
    "survival_function",
    "mfpt_closed_form",
    "mfpt_via_inverse",
    "mfpt_via_wtd",
    "classical_absorption_time",
]


class SingularRateMatrix(RuntimeError):
    """Rate matrix is not invertible (no trap, so no first-passage time)."""


class RecursionNonConvergent(RuntimeError):
    """The waiting-time recursion has a singular linear system."""


def classical_rates(
    hopping: float, dephasing: float, defect: float, trap_rate: float
) -> tuple[float, float, float]:
    """Hop rates (defect bond, body bond, trap bond) of the directed chains.

    ``k_a = 2 J^2 g / (g^2 + d^2)``, ``k_b = 2 J^2 / g``,
    ``k_c = 2 J^2 / (g + Gamma/2)`` for dephasing ``g``, defect ``d``.
    """
    if dephasing <= 0:
        raise ValueError("the classical limit requires a positive dephasing rate")
    j2 = 2.0 * hopping * hopping
    k_a = j2 * dephasing / (dephasing**2 + defect**2)
    k_b = j2 / dephasing
    k_c = j2 / (dephasing + 0.5 * trap_rate)
    return k_a, k_b, k_c


@dataclass(frozen=True)
class RateModel:
    """Directed chain of ``L + 1`` effective sites with the trap on site 1.

    ``k_right[i]`` is the rate from site ``i+1`` to ``i+2`` (away from the
    trap); ``k_left[i]`` the rate back across the same bond.  Column sums of
    ``matrix`` vanish except the trap column, which sums to ``-trap_rate``.
    """

    matrix: np.ndarray = field(repr=False)
    k_right: np.ndarray
    k_left: np.ndarray
    trap_rate: float
    rate_defect: float
    rate_body: float
    rate_trap: float
    origin: NetworkKind
    spec: NetworkSpec
    dephasing: float

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]

    @property
    def delta_chain(self) -> int:
        """1 for chain origin (symmetric amplified trap bond), else 0."""
        return 1 if self.origin is NetworkKind.CHAIN else 0


def _assemble_rate_matrix(k_right: np.ndarray, k_left: np.ndarray, trap_rate: float) -> np.ndarray:
    m = k_right.size + 1
    k = np.zeros((m, m))
    for i in range(m - 1):
        k[i + 1, i] += k_right[i]
        k[i, i] -= k_right[i]
        k[i, i + 1] += k_left[i]
        k[i + 1, i + 1] -= k_left[i]
    k[0, 0] -= trap_rate
    return k


def build_rate_model(spec: NetworkSpec, dephasing: float) -> RateModel:
    """Effective directed chain of a network in the strong-dephasing limit.

    Bond layout from the trap outward: trap bond (anisotropic for the star:
    ``k_c`` toward the trap, ``N k_c`` away; symmetric ``N k_c`` for the
    chain), then body bonds ``k_b``, then the defect bond ``k_a``.  For
    ``L = 1`` the single bond connects trap and defect directly and carries
    the combined rate ``2 J^2 (g + Gamma/2) / ((g + Gamma/2)^2 + d^2)``.
    """
    if dephasing <= 0:
        raise ValueError("the classical limit requires a positive dephasing rate")
    k_a, k_b, k_c = classical_rates(spec.hopping, dephasing, spec.defect, spec.trap_rate)
    ll, nn = spec.length, spec.n_branches
    k_right = np.full(ll, k_b)
    k_left = np.full(ll, k_b)
    if ll == 1:
        # trap and defect share one bond: dephasing plus trap-enhanced
        # coherence decay against the defect detuning
        g_eff = dephasing + 0.5 * spec.trap_rate
        k1 = 2.0 * spec.hopping**2 * g_eff / (g_eff**2 + spec.defect**2)
        k_left[0] = k1 if spec.kind is NetworkKind.STAR else nn * k1
        k_right[0] = nn * k1
    else:
        k_right[ll - 1] = k_left[ll - 1] = k_a
        k_left[0] = k_c if spec.kind is NetworkKind.STAR else nn * k_c
        k_right[0] = nn * k_c
    return RateModel(
        matrix=_assemble_rate_matrix(k_right, k_left, spec.trap_rate),
        k_right=k_right,
        k_left=k_left,
        trap_rate=spec.trap_rate,
        rate_defect=k_a,
        rate_body=k_b,
        rate_trap=k_c,
        origin=spec.kind,
        spec=spec,
        dephasing=dephasing,
    )


def _initial_populations(model: RateModel) -> np.ndarray:
    p0 = np.zeros(model.n_sites)
    p0[-1] = 1.0
    return p0


def survival_function(model: RateModel) -> ExponentialSum:
    """Total surviving population as an exponential sum over rate modes."""
    decomp = SpectralDecomposition.decompose(model.matrix)
    return decomp.scalar(np.ones(model.n_sites, dtype=complex), _initial_populations(model))


def evolve_rates(model: RateModel, times) -> ObservableSeries:
    """Absorption series of the rate model, starting from the defect end."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    alive = survival_function(model).real(times)
    return ObservableSeries(
        times=times,
        p_absorbed=np.clip(1.0 - alive, 0.0, 1.0),
        spec=model.spec,
        dephasing=model.dephasing,
        provenance=Provenance.CLASSICAL,
    )


def mfpt_closed_form(spec: NetworkSpec, dephasing: float) -> float:
    """Closed-form mean first-passage time of the effective directed chain.

    ``N_S/Gamma + 1/k_a + (L+1)(L-2)/(2 k_b) + (L/k_c)(1 + (1-N)/N)`` with
    the last correction applying to the chain only (its amplified trap bond
    divides the trap-adjacent residence by ``N``).  ``N_S`` is the site
    count of the originating network, which is why the star plateau sits
    roughly ``N`` times higher.  Restricted to ``L >= 2``; the body term is
    meaningless at ``L = 1`` (use the matrix routes there).
    """
    if spec.length < 2:
        raise ValueError("closed form requires length >= 2; use mfpt_via_inverse instead")
    if spec.trap_rate <= 0:
        raise SingularRateMatrix("trap rate must be positive")
    k_a, k_b, k_c = classical_rates(spec.hopping, dephasing, spec.defect, spec.trap_rate)
    ll, nn = spec.length, spec.n_branches
    delta_ch = 1 if spec.kind is NetworkKind.CHAIN else 0
    tau = spec.total_sites / spec.trap_rate
    tau += 1.0 / k_a
    tau += (ll + 1.0) * (ll - 2.0) / (2.0 * k_b)
    tau += (ll / k_c) * (1.0 + delta_ch * (1.0 - nn) / nn)
    return tau


def classical_absorption_time(spec: NetworkSpec, dephasing: float) -> float:
    """Analytic absorption-time estimate ``ln(2) * MFPT``."""
    return math.log(2.0) * mfpt_closed_form(spec, dephasing)


def _residence_amplitudes(model: RateModel) -> np.ndarray:
    """Per-site amplitudes of the inverse-rate-matrix recurrence.

    ``r_1 = 1/Gamma`` and each further site multiplies by the ratio of the
    outward rate to the inward rate of the bond just crossed.
    """
    r = np.empty(model.n_sites)
    r[0] = 1.0 / model.trap_rate
    for m in range(1, model.n_sites):
        r[m] = r[m - 1] * model.k_right[m - 1] / model.k_left[m - 1]
    return r


def mfpt_via_inverse(model: RateModel) -> float:
    """MFPT from the inverse rate matrix, cross-checked by its recurrence.

    Solves ``K x = P(0)`` and sums ``-x``; independently accumulates the
    residence-amplitude recurrence.  The two must agree to 1e-10 relative.
    """
    if model.trap_rate <= 0:
        raise SingularRateMatrix("trap rate must be positive for a finite passage time")
    try:
        x = np.linalg.solve(model.matrix, _initial_populations(model))
    except np.linalg.LinAlgError as err:
        raise SingularRateMatrix(str(err)) from err
    tau_direct = float(-np.sum(x))

    r = _residence_amplitudes(model)
    tau_rec = float(np.sum(r))
    for m in range(model.n_sites - 1):
        tau_rec += float(np.sum(r[m + 1 :])) / (r[m] * model.k_right[m])
    if not math.isclose(tau_direct, tau_rec, rel_tol=1e-10):
        raise RuntimeError(
            f"inverse-matrix and recurrence MFPTs disagree: {tau_direct!r} vs {tau_rec!r}"
        )
    return tau_direct


@dataclass(frozen=True)
class LaplaceWTD:
    """Waiting-time-distribution machinery on the trap-augmented chain.

    Site 0 is the virtual drain fed by the trap; sites ``1..L+1`` are the
    chain.  ``waiting_matrix(z)`` holds the Laplace-domain per-bond
    transition densities ``K~_ij / (z + escape_j)`` (the drain column is
    identically zero: nothing leaves it).
    """

    augmented: np.ndarray = field(repr=False)
    escape: np.ndarray

    @classmethod
    def for_model(cls, model: RateModel) -> "LaplaceWTD":
        m = model.n_sites
        kt = np.zeros((m + 1, m + 1))
        kt[1:, 1:] = model.matrix
        kt[0, 1] = model.trap_rate
        return cls(augmented=kt, escape=-np.diag(kt).copy())

    @property
    def n_sites(self) -> int:
        return self.augmented.shape[0]

    def waiting_matrix(self, z: float) -> np.ndarray:
        q = np.zeros_like(self.augmented)
        q[:, 1:] = self.augmented[:, 1:] / (z + self.escape[1:])
        return q

    def waiting_matrix_derivative(self, z: float) -> np.ndarray:
        qp = np.zeros_like(self.augmented)
        qp[:, 1:] = -self.augmented[:, 1:] / (z + self.escape[1:]) ** 2
        return qp

    def _system(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # phi_i = Q[i+1,i] phi_{i+1} + Q[i-1,i] phi_{i-1}, phi_0 = 1,
        # phi_last = Q[last-1,last] phi_{last-1}; unknowns phi_1..phi_last.
        n = self.n_sites - 1
        a = np.eye(n)
        b = np.zeros(n)
        for row, site in enumerate(range(1, n)):
            a[row, row + 1] -= q[site + 1, site]
            if site - 1 >= 1:
                a[row, row - 1] -= q[site - 1, site]
            else:
                b[row] = q[0, site]
        a[n - 1, n - 2] -= q[n - 1, n]
        return a, b

    def passage_distribution(self, z: float) -> np.ndarray:
        """All ``phi_i(z)`` for ``i = 1..L+1`` (first-passage transforms to the drain)."""
        a, b = self._system(self.waiting_matrix(z))
        try:
            return np.linalg.solve(a, b)
        except np.linalg.LinAlgError as err:
            raise RecursionNonConvergent(f"singular waiting-time system at z={z}") from err

    def mean_passage_time(self) -> float:
        """``-d phi_last / dz`` at ``z = 0`` by exact accumulation and finite difference."""
        phi0 = self.passage_distribution(0.0)
        a0, _ = self._system(self.waiting_matrix(0.0))
        ap, bp = self._system_derivative()
        try:
            dphi = np.linalg.solve(a0, bp - ap @ phi0)
        except np.linalg.LinAlgError as err:
            raise RecursionNonConvergent("singular system in the derivative solve") from err
        tau_exact = float(-dphi[-1].real)

        # 1e-4/tau balances truncation against solver roundoff when the
        # first (small) step drowns in an ill-conditioned phi solve
        for h in (1e-6 / tau_exact, 1e-4 / tau_exact):
            tau_fd = float(
                -(self.passage_distribution(h)[-1] - self.passage_distribution(-h)[-1])
                / (2.0 * h)
            )
            if math.isclose(tau_exact, tau_fd, rel_tol=1e-7):
                return tau_exact
        raise RuntimeError(
            f"rational-derivative and finite-difference MFPTs disagree: "
            f"{tau_exact!r} vs {tau_fd!r}"
        )

    def _system_derivative(self) -> tuple[np.ndarray, np.ndarray]:
        qp = self.waiting_matrix_derivative(0.0)
        n = self.n_sites - 1
        ap = np.zeros((n, n))
        bp = np.zeros(n)
        for row, site in enumerate(range(1, n)):
            ap[row, row + 1] -= qp[site + 1, site]
            if site - 1 >= 1:
                ap[row, row - 1] -= qp[site - 1, site]
            else:
                bp[row] = qp[0, site]
        ap[n - 1, n - 2] -= qp[n - 1, n]
        return ap, bp


def mfpt_via_wtd(model: RateModel) -> float:
    """MFPT from the Laplace-domain waiting-time-distribution recursion."""
    if model.trap_rate <= 0:
        raise SingularRateMatrix("trap rate must be positive for a finite passage time")
    return LaplaceWTD.for_model(model).mean_passage_time()
