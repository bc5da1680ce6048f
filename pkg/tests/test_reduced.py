import numpy as np
import pytest
import scipy.linalg

from conftest import ode_reference_states
from exstar import (
    NetworkSpec,
    build_rate_model,
    build_reduced_generator,
    evolve_rates,
    evolve_reduced,
    initial_state,
    reduce_density_matrix,
)
from exstar.observables import absorption_curve, absorption_time_for
from exstar.reduced import ReducedState, initial_reduced_state, reduced_dimension


def star(n, l, **kw):
    return NetworkSpec(kind="star", n_branches=n, length=l, **kw)


class TestGeneratorStructure:
    def test_dimension_is_independent_of_branch_count(self):
        assert reduced_dimension(4) == 41  # vs (1 + 5*4)**2 = 441 full variables
        for n in (3, 5, 9):
            g = build_reduced_generator(star(n, 4), 0.1)
            assert g.dim == 41

    def test_core_population_row(self):
        spec = star(4, 3, trap_rate=0.3)
        g = build_reduced_generator(spec, 0.2).matrix
        ll = 3
        k1 = 1 + 2 * ll * ll
        k1c = k1 + ll
        row = g[0]
        assert row[0] == pytest.approx(-0.3)
        assert row[k1] == pytest.approx(-1j * spec.hopping)
        assert row[k1c] == pytest.approx(1j * spec.hopping)
        nonzero = np.nonzero(row)[0]
        assert set(nonzero) == {0, k1, k1c}

    def test_branch_hamiltonian_shape(self):
        g = build_reduced_generator(star(3, 4, defect=1.7), 0.0)
        h = g.branch_hamiltonian
        assert h.shape == (4, 4)
        assert h[3, 3] == pytest.approx(1.7)
        assert h[0, 1] == h[2, 3] == pytest.approx(1.0)
        assert h[0, 0] == h[1, 1] == 0.0

    def test_rejects_chain_and_negative_dephasing(self):
        with pytest.raises(ValueError):
            build_reduced_generator(
                NetworkSpec(kind="chain", n_branches=3, length=2), 0.1
            )
        with pytest.raises(ValueError):
            build_reduced_generator(star(3, 2), -0.5)


class TestInitialReducedState:
    def test_matches_projection_of_uniform_peripheral_state(self):
        # the hard-coded image must equal the branch sums of the explicit rho0
        for n, l in [(3, 2), (5, 4), (1, 3)]:
            spec = star(n, l)
            projected = reduce_density_matrix(initial_state(spec))
            direct = initial_reduced_state(spec)
            assert projected.core_pop == pytest.approx(0.0)
            assert np.abs(projected.intra - direct.intra).max() < 1e-12
            assert np.abs(projected.inter - direct.inter).max() < 1e-12
            assert np.abs(projected.core_coh - direct.core_coh).max() < 1e-12
            assert direct.intra[l - 1, l - 1] == pytest.approx(1.0)
            assert direct.inter[l - 1, l - 1] == pytest.approx(n - 1.0)

    def test_vector_round_trip(self):
        state = initial_reduced_state(star(4, 3))
        back = ReducedState.from_vector(state.to_vector(), 3)
        assert np.abs(back.intra - state.intra).max() == 0.0
        assert back.survival() == pytest.approx(1.0)


class TestReducedDynamics:
    def test_projection_commutes_with_evolution(self):
        # reduce(full rho(t)) must equal exp(G t) applied to the reduced image
        spec = star(3, 2, defect=0.8, trap_rate=0.25)
        gamma = 0.15
        gen = build_reduced_generator(spec, gamma)
        times = [0.0, 2.0, 9.0, 30.0]
        refs = ode_reference_states(spec, gamma, times, rtol=1e-11)
        v0 = initial_reduced_state(spec).to_vector()
        from exstar import DensityMatrix

        for t, ref in zip(times, refs):
            vt = scipy.linalg.expm(gen.matrix * t) @ v0
            got = ReducedState.from_vector(vt, spec.length)
            want = reduce_density_matrix(DensityMatrix(matrix=ref, spec=spec))
            assert abs(got.core_pop - want.core_pop) < 1e-8
            assert np.abs(got.intra - want.intra).max() < 1e-8
            assert np.abs(got.inter - want.inter).max() < 1e-8
            assert np.abs(got.core_coh - want.core_coh).max() < 1e-8

    def test_absorption_matches_full_fls(self, rng):
        for _ in range(8):
            spec = star(
                int(rng.integers(3, 7)),
                int(rng.integers(2, 6)),
                defect=float(rng.uniform(0, 3)),
                trap_rate=float(rng.uniform(0.05, 0.4)),
            )
            gamma = float(rng.choice([0.0, 0.05, 0.5]))
            times = np.linspace(0.0, 10 * spec.total_sites / spec.trap_rate, 150)
            pa_full = absorption_curve(spec, gamma, "full").p_absorbed(times)
            pa_red = evolve_reduced(build_reduced_generator(spec, gamma), spec, times).p_absorbed
            assert np.abs(pa_full - pa_red).max() < 1e-8

    def test_absorption_time_agrees_with_full(self):
        spec = star(5, 5, defect=2.0, trap_rate=0.1)
        tau_red = absorption_time_for(spec, 0.1, "reduced").tau
        tau_full = absorption_time_for(spec, 0.1, "full").tau
        assert tau_red == pytest.approx(tau_full, abs=1e-6)

    def test_starts_unabsorbed(self):
        spec = star(4, 3)
        series = evolve_reduced(build_reduced_generator(spec, 0.3), spec, [0.0, 1.0])
        assert series.p_absorbed[0] == pytest.approx(0.0, abs=1e-12)

    def test_conservation_without_trap(self):
        spec = star(4, 3, defect=1.2, trap_rate=0.0)
        gen = build_reduced_generator(spec, 0.4)
        series = evolve_reduced(gen, spec, np.linspace(0.0, 60.0, 80))
        assert np.abs(series.p_absorbed).max() < 1e-8

    def test_strong_dephasing_approaches_rate_model(self):
        # beyond a few dephasing times the classical directed chain takes over
        spec = star(4, 3, defect=1.0, trap_rate=0.1)
        gamma = 50.0
        times = np.linspace(10.0 / gamma, 10 * spec.total_sites / spec.trap_rate, 60)
        pa_red = evolve_reduced(build_reduced_generator(spec, gamma), spec, times).p_absorbed
        pa_cl = evolve_rates(build_rate_model(spec, gamma), times).p_absorbed
        assert np.abs(pa_red - pa_cl).max() < 0.02

    def test_spec_mismatch_rejected(self):
        gen = build_reduced_generator(star(3, 2), 0.1)
        with pytest.raises(ValueError):
            evolve_reduced(gen, star(4, 2), [0.0, 1.0])
