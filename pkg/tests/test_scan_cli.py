import csv
import math

import numpy as np
import pytest

from exstar import NetworkSpec
from exstar.cli import main
from exstar.observables import absorption_time_for, optimal_defect
from exstar.scan import (
    RESULT_FIELDS,
    SweepJob,
    classical_comparison_rows,
    heatmap_speedup,
    run_sweep,
    write_rows,
)


def star(n, l, **kw):
    return NetworkSpec(kind="star", n_branches=n, length=l, **kw)


def chain(n, l, **kw):
    return NetworkSpec(kind="chain", n_branches=n, length=l, **kw)


class TestSweep:
    def test_rows_follow_axis_order(self):
        job = SweepJob(
            base=chain(3, 2),
            dephasing=0.0,
            axes=(("delta", (0.0, 0.5)), ("gamma", (0.0, 0.1))),
        )
        rows = run_sweep(job, workers=1)
        assert [(r.delta, r.gamma) for r in rows] == [
            (0.0, 0.0),
            (0.0, 0.1),
            (0.5, 0.0),
            (0.5, 0.1),
        ]
        assert all(r.converged and r.tau > 0 for r in rows)

    def test_parallel_matches_serial(self):
        job = SweepJob(
            base=chain(4, 2), dephasing=0.05, axes=(("delta", tuple(np.linspace(0, 2, 6))),)
        )
        serial = run_sweep(job, workers=1)
        parallel = run_sweep(job, workers=4)
        assert [r.tau for r in serial] == [r.tau for r in parallel]

    def test_partial_failures_recorded_not_raised(self):
        job = SweepJob(
            base=chain(3, 2),
            dephasing=0.0,
            axes=(("gamma_trap", (0.0, 0.1)),),
        )
        rows = run_sweep(job, workers=1)
        assert [r.converged for r in rows] == [False, True]
        assert math.isnan(rows[0].tau)

    def test_local_minimum_near_optimal_defect_for_each_length(self):
        # coarse defect sweep: every branch length shows a dip at sqrt(N-1)
        job = SweepJob(
            base=star(5, 4),
            dephasing=0.0,
            axes=(("L", (4, 6, 8)), ("delta", tuple(np.arange(0.0, 4.01, 0.25)))),
        )
        rows = run_sweep(job)
        deltas = np.arange(0.0, 4.01, 0.25)
        for l in (4, 6, 8):
            taus = np.array([r.tau for r in rows if r.L == l])
            interior = np.nonzero(
                (taus[1:-1] < taus[:-2]) & (taus[1:-1] < taus[2:])
            )[0]
            assert any(abs(deltas[i + 1] - 2.0) <= 0.3 for i in interior)

    def test_engine_equivalence_audit(self):
        base = star(4, 3, defect=0.0)
        deltas = tuple(np.linspace(0.0, 3.0, 10))
        rows_r = run_sweep(
            SweepJob(base=base, dephasing=0.1, axes=(("delta", deltas),), engine="reduced")
        )
        rows_f = run_sweep(
            SweepJob(base=base, dephasing=0.1, axes=(("delta", deltas),), engine="full")
        )
        for a, b in zip(rows_r, rows_f):
            assert a.tau == pytest.approx(b.tau, abs=1e-6)

    def test_rejects_bad_axes(self):
        with pytest.raises(ValueError):
            SweepJob(base=chain(3, 2), dephasing=0.0, axes=())
        with pytest.raises(ValueError):
            SweepJob(base=chain(3, 2), dephasing=0.0, axes=(("bogus", (1,)),))


class TestCsv:
    def test_header_and_determinism(self, tmp_path):
        job = SweepJob(
            base=chain(3, 2), dephasing=0.0, axes=(("delta", (0.0, 1.0)),)
        )
        rows = run_sweep(job)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_rows(p1, rows)
        write_rows(p2, run_sweep(job))
        assert p1.read_bytes() == p2.read_bytes()
        header = p1.read_text().splitlines()[0]
        assert header == "kind,N,L,J,delta,gamma,gamma_trap,tau,speedup,engine,converged"

    def test_unconverged_rows_have_empty_tau(self, tmp_path):
        job = SweepJob(base=chain(3, 2, trap_rate=0.0), dephasing=0.0, axes=(("delta", (0.0,)),))
        path = tmp_path / "rows.csv"
        write_rows(path, run_sweep(job))
        with path.open() as fh:
            record = next(csv.DictReader(fh))
        assert record["tau"] == ""
        assert record["converged"] == "false"
        assert set(record) == set(RESULT_FIELDS)


class TestHeatmap:
    def test_speedup_grid(self):
        matrix, rows = heatmap_speedup(star(3, 2), [4, 5], [3, 4], 0.0)
        assert matrix.shape == (2, 2)
        assert np.all(matrix > 0.0)  # deep inside the speedup region
        by_cell = {(r.N, r.L): r for r in rows}
        assert set(by_cell) == {(4, 3), (4, 4), (5, 3), (5, 4)}
        r = by_cell[(5, 4)]
        assert r.delta == pytest.approx(optimal_defect(5))
        assert r.speedup == pytest.approx(matrix[1, 1])
        assert r.tau == pytest.approx(absorption_time_for(star(5, 4, defect=2.0), 0.0).tau, abs=1e-6)

    def test_moderate_dephasing_kills_speedup(self):
        matrix, _ = heatmap_speedup(star(3, 2), [5], [4, 5], 0.5)
        assert np.all(matrix <= 0.0)

    def test_weak_dephasing_keeps_speedup(self):
        matrix, _ = heatmap_speedup(star(3, 2), [5], [4], 0.01)
        assert matrix[0, 0] > 0.0


class TestClassicalComparison:
    def test_columns_and_consistency(self):
        rows = classical_comparison_rows(star(5, 4, defect=2.0), [1.0, 5.0])
        for row in rows:
            assert set(row) == {"gamma", "tau_quantum", "tau_closed_form", "tau_inverse", "tau_wtd"}
            assert row["tau_closed_form"] == pytest.approx(row["tau_inverse"], rel=1e-9)
            assert row["tau_closed_form"] == pytest.approx(row["tau_wtd"], rel=1e-7)
            assert abs(row["tau_quantum"] - row["tau_closed_form"]) / row["tau_quantum"] < 0.10


class TestCli:
    def test_simulate_series(self, tmp_path):
        out = tmp_path / "series.csv"
        rc = main(
            [
                "simulate",
                "--kind", "chain", "--N", "4", "--L", "3",
                "--delta", "1.0", "--gamma", "0.1",
                "--tmax", "50", "--points", "101",
                "--out", str(out),
            ]
        )
        assert rc == 0
        with out.open() as fh:
            reader = csv.DictReader(fh)
            assert reader.fieldnames == ["time", "p_absorbed"]
            records = list(reader)
        assert len(records) == 101
        assert float(records[0]["p_absorbed"]) == 0.0
        assert float(records[-1]["time"]) == pytest.approx(50.0)

    def test_sweep_delta_with_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "kind = star\nN = 4\nL = 2\nJ = 1.0\ngamma = 0.05\ngamma_trap = 0.1\n"
        )
        out = tmp_path / "sweep.csv"
        rc = main(
            [
                "sweep-delta", "--config", str(cfg),
                "--delta-min", "0", "--delta-max", "1", "--delta-step", "0.5",
                "--out", str(out), "--workers", "1",
            ]
        )
        assert rc == 0
        with out.open() as fh:
            records = list(csv.DictReader(fh))
        assert [r["delta"] for r in records] == ["0.0", "0.5", "1.0"]
        assert all(r["kind"] == "star" and r["engine"] == "reduced" for r in records)

    def test_cli_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("kind = chain\nN = 3\nL = 2\ndelta = 0.0\n")
        out = tmp_path / "series.csv"
        rc = main(
            ["simulate", "--config", str(cfg), "--L", "4", "--tmax", "10",
             "--points", "11", "--out", str(out)]
        )
        assert rc == 0
        assert out.exists()

    def test_heatmap_and_classical_outputs(self, tmp_path):
        out = tmp_path / "heat.csv"
        rc = main(
            [
                "heatmap", "--kind", "star", "--N", "4", "--L", "3",
                "--n-min", "3", "--n-max", "4", "--l-min", "2", "--l-max", "3",
                "--out", str(out), "--workers", "1",
            ]
        )
        assert rc == 0
        with out.open() as fh:
            records = list(csv.DictReader(fh))
        assert len(records) == 4
        assert all(r["speedup"] != "" for r in records)

        out2 = tmp_path / "mfpt.csv"
        rc = main(
            [
                "classical-mfpt", "--kind", "chain", "--N", "4", "--L", "3",
                "--delta", "1.0",
                "--gamma-min", "1", "--gamma-max", "10", "--gamma-points", "3",
                "--out", str(out2),
            ]
        )
        assert rc == 0
        with out2.open() as fh:
            reader = csv.DictReader(fh)
            assert reader.fieldnames == [
                "gamma", "tau_quantum", "tau_closed_form", "tau_inverse", "tau_wtd",
            ]
            assert len(list(reader)) == 3

    def test_validate_returns_zero(self):
        assert main(["validate"]) == 0

    def test_missing_required_parameter(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["simulate", "--kind", "chain", "--out", str(tmp_path / "x.csv")])
