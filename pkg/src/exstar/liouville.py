"""Pure-dephasing master equation in Fock-Liouville (vectorized) form.

The exciton density matrix obeys the Haken-Strobl-Reineker equation: a
coherent non-Hermitian commutator plus uniform decay of every inter-site
coherence at the dephasing rate.  Flattening ``rho`` row-major turns this
into a linear ODE whose generator (the Liouvillian) is diagonalized once;
states and observables at arbitrary times then come from the spectral
propagator.  Near-defective generators fall back to adaptive integration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .networks import DensityMatrix, Hamiltonian, NetworkSpec
from .spectral import ExponentialSum, NearDefective, SpectralDecomposition

__all__ = [
    "Liouvillian",
    "Propagator",
    "NearDefective",
    "build_liouvillian",
    "diagonalize",
    "evolve",
    "evolve_ode",
    "survival_function",
]

ODE_RTOL = 1e-9


@dataclass(frozen=True)
class Liouvillian:
    """Dense generator of the vectorized master equation.

    ``matrix`` acts on row-major flattened density matrices, i.e.
    ``vec(rho)[x * n + y] = rho[x, y]``.
    """

    matrix: np.ndarray = field(repr=False)
    dephasing: float
    hamiltonian: Hamiltonian

    @property
    def spec(self) -> NetworkSpec:
        return self.hamiltonian.spec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Propagator:
    """Spectral form of ``exp(L t)``, reusable across times and states."""

    decomposition: SpectralDecomposition = field(repr=False)
    liouvillian: Liouvillian = field(repr=False)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.decomposition.eigenvalues

    @property
    def right(self) -> np.ndarray:
        return self.decomposition.right

    @property
    def left(self) -> np.ndarray:
        return self.decomposition.left

    @property
    def norms(self) -> np.ndarray:
        return self.decomposition.norms

    @property
    def spec(self) -> NetworkSpec:
        return self.liouvillian.spec


def build_liouvillian(hamiltonian: Hamiltonian, dephasing: float) -> Liouvillian:
    """Assemble the dephasing Liouvillian for a network Hamiltonian.

    Row ``(x, y)`` of the generator encodes
    ``-i (H rho - rho H^dag)_{xy} - dephasing * (1 - delta_xy) rho_{xy}``.
    """
    if dephasing < 0:
        raise ValueError(f"dephasing rate must be non-negative, got {dephasing}")
    h = hamiltonian.matrix
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.conj()))
    if dephasing:
        offdiag = 1.0 - np.eye(n)
        lv -= dephasing * np.diag(offdiag.reshape(-1))
    return Liouvillian(matrix=lv, dephasing=dephasing, hamiltonian=hamiltonian)


def diagonalize(liouvillian: Liouvillian) -> Propagator:
    """Full left/right eigendecomposition of the Liouvillian.

    Raises
    ------
    NearDefective
        When left/right eigenvector pairing is numerically unreliable; the
        caller should evolve with :func:`evolve_ode` instead.
    """
    return Propagator(
        decomposition=SpectralDecomposition.decompose(liouvillian.matrix),
        liouvillian=liouvillian,
    )


def _symmetrized(rho: np.ndarray) -> np.ndarray:
    # spectral reconstruction breaks Hermiticity at roundoff level
    return 0.5 * (rho + rho.conj().T)


def evolve(propagator: Propagator, rho0: DensityMatrix, times) -> list[DensityMatrix]:
    """Density matrices ``rho(t)`` at the requested times.

    ``times`` must be non-negative; the output is re-symmetrized so the
    Hermiticity invariants stay sharp.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    _check_evolution_inputs(rho0, times)
    n = rho0.matrix.shape[0]
    flat = propagator.decomposition.propagate(rho0.matrix.reshape(-1), times)
    spec = propagator.spec
    return [
        DensityMatrix(matrix=_symmetrized(v.reshape(n, n)), spec=spec) for v in flat
    ]


def evolve_ode(
    liouvillian: Liouvillian, rho0: DensityMatrix, times, rtol: float = ODE_RTOL
) -> list[DensityMatrix]:
    """Adaptive RK45 fallback integration of the master equation.

    Integrates ``d rho/dt = -i (H rho - rho H^dag) - gamma * offdiag(rho)``
    directly in matrix form; used when :func:`diagonalize` reports a
    near-defective generator.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    _check_evolution_inputs(rho0, times)
    h = liouvillian.hamiltonian.matrix
    gamma = liouvillian.dephasing
    n = h.shape[0]

    def rhs(_t, flat):
        rho = flat.reshape(n, n)
        drho = -1j * (h @ rho - rho @ h.conj().T)
        if gamma:
            drho -= gamma * (rho - np.diag(np.diag(rho)))
        return drho.reshape(-1)

    sol = scipy.integrate.solve_ivp(
        rhs,
        (0.0, float(times[-1]) if times[-1] > 0 else 1e-12),
        rho0.matrix.reshape(-1).astype(complex),
        t_eval=times,
        method="RK45",
        rtol=rtol,
        atol=1e-12,
    )
    if not sol.success:
        raise RuntimeError(f"fallback integration failed: {sol.message}")
    spec = liouvillian.spec
    return [
        DensityMatrix(matrix=_symmetrized(sol.y[:, i].reshape(n, n)), spec=spec)
        for i in range(sol.y.shape[1])
    ]


def survival_function(propagator: Propagator, rho0: DensityMatrix) -> ExponentialSum:
    """``Tr rho(t)`` as an exponential sum (absorption is one minus this)."""
    n = rho0.matrix.shape[0]
    trace_row = np.eye(n, dtype=complex).reshape(-1)
    return propagator.decomposition.scalar(trace_row, rho0.matrix.reshape(-1))


def _check_evolution_inputs(rho0: DensityMatrix, times: np.ndarray) -> None:
    if times.size and times.min() < 0:
        raise ValueError("evolution times must be non-negative")
    if times.size > 1 and np.any(np.diff(times) < 0):
        raise ValueError("evolution times must be ascending")
    tr = np.trace(rho0.matrix)
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"initial state must have unit trace, got {tr}")
