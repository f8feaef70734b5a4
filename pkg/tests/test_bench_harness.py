import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ckfscreen.bench_harness import (
    Table1Result,
    critical_value,
    min_model_size,
    power_study,
    run_table1,
    signal_coefficient,
    sure_screening_experiment,
    write_power,
    write_table1,
)
from ckfscreen.errors import InvalidInputError
from ckfscreen.filters import FeatureScores, Method


class TestMinModelSize:
    # true sets are 0-based
    def test_examples(self):
        assert min_model_size(np.array([0.9, 0.8, 0.1, 0.2]), {0, 1}) == 2
        assert min_model_size(np.array([0.9, 0.1, 0.5, 0.2]), {0, 1}) == 4
        assert min_model_size(np.array([0.5, 0.5, 0.5]), {0}) == 3

    def test_accepts_feature_scores(self):
        fs = FeatureScores(Method.CKF, np.array([0.1, 0.7, 0.3]))
        assert min_model_size(fs, {1}) == 1

    def test_bad_true_sets(self):
        with pytest.raises(InvalidInputError):
            min_model_size(np.array([0.1, 0.2]), set())
        with pytest.raises(InvalidInputError):
            min_model_size(np.array([0.1, 0.2]), {2})

    @given(
        st.lists(st.integers(0, 6), min_size=1, max_size=25).flatmap(
            lambda s: st.tuples(st.just(s), st.sets(st.integers(0, len(s) - 1), min_size=1))
        )
    )
    def test_bounds_and_monotone_invariance(self, case):
        raw, true_set = case
        s = np.asarray(raw, dtype=float)
        size = min_model_size(s, true_set)
        assert len(true_set) <= size <= len(raw)
        assert size == min_model_size(np.exp(s) - 3.0, true_set)


class TestTable1:
    def test_no_noise_features_gives_d(self):
        res = run_table1(models=[1], methods=["sis", "dcs", "fkf", "ckf", "kf"], n=40, p=2, reps=1)
        assert not res.failures
        assert [r.min_model_size for r in res.records] == [2] * 5

    def test_deterministic_and_order_free(self):
        a = run_table1(models=[1, 7], methods=["ckf", "sis"], n=60, p=40, reps=3, master_seed=5)
        b = run_table1(models=[7, 1], methods=["sis", "ckf"], n=60, p=40, reps=3, master_seed=5)
        key = lambda r: (r.model_id, r.method, r.rep_index)
        strip = lambda rs: sorted(((key(r), r.seed, r.min_model_size) for r in rs))
        assert strip(a.records) == strip(b.records)
        assert a.summary() == b.summary()

    def test_threads_do_not_change_records(self):
        runs = [
            run_table1(models=[4], methods=["ckf", "fkf"], n=50, p=30, reps=2, master_seed=1, threads=t)
            for t in (1, 3)
        ]
        assert [(r.seed, r.min_model_size) for r in runs[0].records] == [
            (r.seed, r.min_model_size) for r in runs[1].records
        ]

    def test_summary_uses_sample_sd(self):
        from ckfscreen.bench_harness import BenchmarkRecord

        res = Table1Result([BenchmarkRecord(1, "ckf", i, 0, v) for i, v in enumerate([2, 2, 5])])
        mean, sd, count = res.cells()[(1, "ckf")]
        assert (mean, count) == (3.0, 3)
        assert sd == pytest.approx(math.sqrt(3.0), rel=1e-15)
        assert res.mean(1, "CKF") == 3.0
        assert "CKF" in res.format_table()

    def test_written_files(self, tmp_path):
        res = run_table1(models=[1], methods=["ckf"], n=30, p=5, reps=2)
        paths = write_table1(res, tmp_path, ["ckfscreen table1"])
        assert set(paths) == {"records", "summary"}
        lines = paths["records"].read_text().splitlines()
        assert lines[0] == "# ckfscreen table1"
        assert lines[1] == "model,method,rep,seed,min_model_size"
        assert len(lines) == 4
        summary = json.loads(paths["summary"].read_text())
        assert summary["cells"]["1"]["ckf"]["reps"] == 2
        assert "timings" in write_table1(res, tmp_path, timings=True)


class TestPower:
    def test_critical_value_randomises_ties(self):
        c, gamma = critical_value([0.1] * 90 + [0.5] * 10, 0.05)
        assert c == 0.5 and gamma == pytest.approx(0.5)
        c, gamma = critical_value(np.arange(100.0), 0.05)
        assert c == 94.0 and gamma == pytest.approx(0.0)

    def test_calibration_and_consistency(self, tmp_path):
        pts = power_study(beta_grid=(0.0, 1.5), n=60, reps=600, null_reps=2000, master_seed=3)
        by = {(p.method, p.beta): p for p in pts}
        for m in ("ckf", "fkf", "kf"):
            null = by[(m, 0.0)]
            assert abs(null.power - 0.05) <= 3 * math.sqrt(0.05 * 0.95 / 600)
            assert by[(m, 1.5)].power == 1.0
        write_power(pts, tmp_path / "power.csv", ["ckfscreen power"])
        rows = (tmp_path / "power.csv").read_text().splitlines()
        assert rows[1] == "beta,method,power,se,reps,critical_value"
        assert len(rows) == 2 + len(pts)

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            power_study(alpha=1.0)
        with pytest.raises(InvalidInputError):
            power_study(methods=["sis"], reps=5, null_reps=5, beta_grid=(0.0,))


class TestSureScreening:
    def test_signal_coefficient_gives_target_correlation(self):
        b = signal_coefficient(0.5, 2)
        assert b / math.sqrt(2 * b * b + 1) == pytest.approx(0.5, rel=1e-15)
        with pytest.raises(InvalidInputError):
            signal_coefficient(0.8, 2)

    def test_full_selection_is_certain(self):
        pts = sure_screening_experiment(n_grid=(20,), p=12, d_n=12, reps=10)
        assert pts[0].probability == 1.0 and pts[0].se == 0.0

    def test_strong_signal_large_n(self):
        pts = sure_screening_experiment(rho_signal=0.6, n_grid=(300,), p=50, d_n=5, reps=20)
        assert pts[0].probability == 1.0
        assert pts[0].delta > 0 and pts[0].delta_exceeds_4_over_n
