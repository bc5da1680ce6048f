import math

import numpy as np
import pytest

from exstar import (
    LaplaceWTD,
    NetworkSpec,
    RateModel,
    SingularRateMatrix,
    build_rate_model,
    classical_absorption_time,
    classical_rates,
    evolve_rates,
    mfpt_closed_form,
    mfpt_via_inverse,
    mfpt_via_wtd,
)
from exstar.classical import _residence_amplitudes
from exstar.observables import absorption_time_for


def star(n, l, **kw):
    return NetworkSpec(kind="star", n_branches=n, length=l, **kw)


def chain(n, l, **kw):
    return NetworkSpec(kind="chain", n_branches=n, length=l, **kw)


class TestClassicalRates:
    def test_reference_point(self):
        k_a, k_b, k_c = classical_rates(1.0, 1.0, 0.0, 0.1)
        assert k_a == pytest.approx(2.0)
        assert k_b == pytest.approx(2.0)
        assert k_c == pytest.approx(2.0 / 1.05)

    def test_large_defect_decouples(self):
        k_a, _, _ = classical_rates(1.0, 1.0, 1e6, 0.1)
        assert k_a == pytest.approx(0.0, abs=1e-9)

    def test_strong_dephasing_collapses_rates(self):
        k_a, k_b, k_c = classical_rates(1.0, 500.0, 1.0, 0.1)
        assert k_a == pytest.approx(k_b, rel=1e-5)
        assert k_c == pytest.approx(k_b, rel=1e-3)

    def test_rejects_zero_dephasing(self):
        with pytest.raises(ValueError):
            classical_rates(1.0, 0.0, 0.0, 0.1)


class TestRateModel:
    def test_star_trap_bond_anisotropy(self):
        model = build_rate_model(star(4, 4, defect=1.0), 2.0)
        assert model.k_left[0] == pytest.approx(model.rate_trap)
        assert model.k_right[0] == pytest.approx(4.0 * model.rate_trap)

    def test_chain_trap_bond_symmetric(self):
        model = build_rate_model(chain(4, 4, defect=1.0), 2.0)
        assert model.k_left[0] == pytest.approx(4.0 * model.rate_trap)
        assert model.k_right[0] == pytest.approx(4.0 * model.rate_trap)
        assert model.delta_chain == 1

    def test_bond_layout(self):
        model = build_rate_model(chain(3, 5, defect=0.8), 1.5)
        assert np.allclose(model.k_right[1:4], model.rate_body)
        assert model.k_right[4] == pytest.approx(model.rate_defect)
        assert model.k_left[4] == pytest.approx(model.rate_defect)

    def test_column_sums(self):
        for spec in (star(5, 3, defect=1.2), chain(5, 3, defect=1.2)):
            model = build_rate_model(spec, 0.9)
            sums = model.matrix.sum(axis=0)
            assert sums[0] == pytest.approx(-spec.trap_rate)
            assert np.abs(sums[1:]).max() < 1e-12

    def test_off_diagonal_nonnegative(self):
        model = build_rate_model(star(3, 4, defect=2.0), 0.7)
        off = model.matrix - np.diag(np.diag(model.matrix))
        assert off.min() >= 0.0
        assert np.diag(model.matrix).max() <= 0.0

    def test_rejects_zero_dephasing(self):
        with pytest.raises(ValueError):
            build_rate_model(star(3, 3), 0.0)


class TestEvolveRates:
    def test_boundary_values(self):
        model = build_rate_model(chain(4, 3, defect=0.5), 1.0)
        series = evolve_rates(model, [0.0, 1e5])
        assert series.p_absorbed[0] == pytest.approx(0.0, abs=1e-12)
        assert series.p_absorbed[-1] == pytest.approx(1.0, abs=1e-8)

    def test_matches_high_precision_matrix_exponential(self):
        # oracle values from a 50-digit mpmath expm of the same rate matrix
        # (trap 1/10; trap bond 6 both ways, defect bond 1/4 both ways)
        model = RateModel(
            matrix=np.array(
                [[-0.1 - 6.0, 6.0, 0.0], [6.0, -6.25, 0.25], [0.0, 0.25, -0.25]]
            ),
            k_right=np.array([6.0, 0.25]),
            k_left=np.array([6.0, 0.25]),
            trap_rate=0.1,
            rate_defect=0.25,
            rate_body=math.nan,
            rate_trap=2.0,
            origin="chain",
            spec=chain(3, 2),
            dephasing=math.nan,
        )
        expected = {
            1: 0.004603933331644039,
            5: 0.08133849065640107,
            20: 0.4197494970895661,
            60: 0.8357704524975059,
        }
        series = evolve_rates(model, sorted(expected))
        for got, (_, want) in zip(series.p_absorbed, sorted(expected.items())):
            assert got == pytest.approx(want, abs=1e-12)


class TestClosedForm:
    def test_plateau_terms(self):
        # dominant term is ln2 * N_S / trap for each origin network
        assert math.log(2.0) * star(5, 5).total_sites / 0.1 == pytest.approx(180.2, abs=0.1)
        assert math.log(2.0) * chain(5, 5).total_sites / 0.1 == pytest.approx(41.6, abs=0.1)

    def test_residence_amplitudes(self):
        g = 0.25
        m_star = build_rate_model(star(5, 4, trap_rate=g, defect=1.0), 2.0)
        r = _residence_amplitudes(m_star)
        assert r[0] == pytest.approx(1.0 / g)
        assert np.allclose(r[1:], 5.0 / g)
        m_chain = build_rate_model(chain(5, 4, trap_rate=g, defect=1.0), 2.0)
        assert np.allclose(_residence_amplitudes(m_chain), 1.0 / g)

    def test_recurrence_reproduces_closed_form(self, rng):
        for _ in range(50):
            spec = NetworkSpec(
                kind=str(rng.choice(["star", "chain"])),
                n_branches=int(rng.integers(3, 9)),
                length=int(rng.integers(2, 11)),
                defect=float(rng.uniform(0, 3)),
                trap_rate=float(rng.uniform(0.02, 0.5)),
            )
            gamma = float(rng.uniform(0.5, 50.0))
            closed = mfpt_closed_form(spec, gamma)
            inverse = mfpt_via_inverse(build_rate_model(spec, gamma))
            assert inverse == pytest.approx(closed, rel=1e-9)

    def test_rejects_short_chains_and_zero_dephasing(self):
        with pytest.raises(ValueError):
            mfpt_closed_form(star(3, 1), 1.0)
        with pytest.raises(ValueError):
            mfpt_closed_form(star(3, 3), 0.0)

    def test_absorption_estimate_is_ln2_scaled(self):
        spec = chain(4, 3, defect=0.5)
        assert classical_absorption_time(spec, 2.0) == pytest.approx(
            math.log(2.0) * mfpt_closed_form(spec, 2.0)
        )


class TestWaitingTimeDistribution:
    def test_absorption_is_certain(self):
        model = build_rate_model(star(4, 5, defect=1.5), 3.0)
        wtd = LaplaceWTD.for_model(model)
        assert wtd.passage_distribution(0.0)[-1] == pytest.approx(1.0, abs=1e-10)

    def test_waiting_matrix_column_stochastic_at_zero(self):
        model = build_rate_model(chain(3, 4, defect=0.4), 1.2)
        q = LaplaceWTD.for_model(model).waiting_matrix(0.0)
        off = q - np.diag(np.diag(q))
        assert np.allclose(off[:, 1:].sum(axis=0), 1.0)
        assert np.abs(q[:, 0]).max() == 0.0

    def test_matches_inverse_route(self, rng):
        for _ in range(20):
            spec = NetworkSpec(
                kind=str(rng.choice(["star", "chain"])),
                n_branches=int(rng.integers(3, 8)),
                length=int(rng.integers(1, 10)),
                defect=float(rng.uniform(0, 3)),
                trap_rate=float(rng.uniform(0.05, 0.5)),
            )
            model = build_rate_model(spec, float(rng.uniform(0.5, 30.0)))
            assert mfpt_via_wtd(model) == pytest.approx(
                mfpt_via_inverse(model), rel=1e-7
            )

    def test_matches_closed_form_at_strong_dephasing(self):
        spec = star(5, 5, defect=2.0)
        model = build_rate_model(spec, 5.0)
        assert mfpt_via_wtd(model) == pytest.approx(mfpt_closed_form(spec, 5.0), rel=1e-7)


class TestMfptProperties:
    def test_three_way_agreement(self, rng):
        for _ in range(50):
            spec = NetworkSpec(
                kind=str(rng.choice(["star", "chain"])),
                n_branches=int(rng.integers(3, 9)),
                length=int(rng.integers(2, 11)),
                defect=float(rng.uniform(0, 3)),
                trap_rate=0.1,
            )
            gamma = float(rng.uniform(0.5, 50.0))
            model = build_rate_model(spec, gamma)
            t1 = mfpt_closed_form(spec, gamma)
            t2 = mfpt_via_inverse(model)
            t3 = mfpt_via_wtd(model)
            assert t2 == pytest.approx(t1, rel=1e-7)
            assert t3 == pytest.approx(t1, rel=1e-7)

    def test_zeno_regime_scales_linearly(self):
        # strong dephasing: passage time follows a straight line in gamma
        spec = star(5, 4, defect=2.0)
        gammas = np.linspace(20.0, 60.0, 9)
        taus = np.array([mfpt_closed_form(spec, g) for g in gammas])
        slope, intercept = np.polyfit(gammas, taus, 1)
        fit = slope * gammas + intercept
        assert np.abs(fit - taus).max() / taus.min() < 0.05

    def test_star_slower_than_chain(self):
        for gamma in (1.0, 10.0, 40.0):
            t_star = mfpt_closed_form(star(5, 4, defect=1.0), gamma)
            t_chain = mfpt_closed_form(chain(5, 4, defect=1.0), gamma)
            assert t_star > t_chain
            # the gap is dominated by the site-count plateau
            assert t_star - t_chain > 0.5 * (21 - 5) / 0.1

    def test_quantum_matches_classical_in_moderate_regime(self):
        spec = star(4, 3, defect=1.0)
        for gamma in (1.0, 10.0):
            tau_q = absorption_time_for(spec, gamma).tau
            tau_cl = classical_absorption_time(spec, gamma)
            assert abs(tau_q - tau_cl) / tau_q < 0.10

    def test_singular_without_trap(self):
        model = build_rate_model(star(3, 3, trap_rate=0.0, defect=1.0), 1.0)
        with pytest.raises(SingularRateMatrix):
            mfpt_via_inverse(model)
        with pytest.raises(SingularRateMatrix):
            mfpt_via_wtd(model)

    def test_single_site_branches_use_matrix_routes(self):
        # closed form refuses L=1 but the matrix machinery still works
        model = build_rate_model(star(4, 1, defect=1.0), 2.0)
        assert mfpt_via_wtd(model) == pytest.approx(mfpt_via_inverse(model), rel=1e-7)
