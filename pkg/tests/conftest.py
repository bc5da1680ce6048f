"""Shared fixtures and the independent brute-force oracle.

The oracle integrates the dephasing master equation directly in matrix form
with an adaptive solver; it never touches the package's spectral machinery,
so agreement is a genuine cross-check.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from exstar import NetworkSpec, build_hamiltonian, initial_state


def ode_reference_states(
    spec: NetworkSpec, gamma: float, times, rtol: float = 1e-10
) -> list[np.ndarray]:
    """Density matrices from direct adaptive integration of the master equation."""
    h = build_hamiltonian(spec).matrix
    n = h.shape[0]
    rho0 = initial_state(spec).matrix.reshape(-1).astype(complex)

    def rhs(_t, flat):
        rho = flat.reshape(n, n)
        drho = -1j * (h @ rho - rho @ h.conj().T)
        if gamma:
            drho -= gamma * (rho - np.diag(np.diag(rho)))
        return drho.reshape(-1)

    times = np.atleast_1d(np.asarray(times, dtype=float))
    sol = solve_ivp(rhs, (0.0, float(times[-1])), rho0, t_eval=times, rtol=rtol, atol=1e-13)
    assert sol.success, sol.message
    return [sol.y[:, i].reshape(n, n) for i in range(sol.y.shape[1])]


def ode_reference_pa(spec: NetworkSpec, gamma: float, times) -> np.ndarray:
    return np.array(
        [1.0 - np.trace(rho).real for rho in ode_reference_states(spec, gamma, times)]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
