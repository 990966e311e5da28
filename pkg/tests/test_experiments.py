import json

import numpy as np
import pytest

from qcmrf.experiments import (ExperimentSpec, derive_seed, draw_scan_params,
                               run_resource_scan, run_training_suite,
                               run_variance_scan, variance_rows_to_csv,
                               write_suite_outputs)
from qcmrf.graphs import generate_graph, maximal_cliques
from qcmrf.training import TrainConfig


def tiny_spec(**overrides):
    g = generate_graph("loop", n=3)
    defaults = dict(name="tiny", graph=g, cliques=maximal_cliques(g),
                    models=("qcibm", "qcmrf"), losses=("kl",),
                    factor_set_count=1, shots=0, sample_count=50,
                    train=TrainConfig(epochs=2, seed=0, report_window=2))
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


class TestTrainingSuite:
    def test_degenerate_spec_one_history_per_combo(self):
        spec = tiny_spec(models=("qcibm", "qcmrf"), losses=("kl", "mmd"),
                         train=TrainConfig(epochs=1, seed=1))
        result = run_training_suite(spec)
        assert set(result.histories) == {(0, m, l) for m in ("qcibm", "qcmrf")
                                         for l in ("kl", "mmd")}
        assert all(h.epochs == 1 for h in result.histories.values())

    def test_summary_series_lengths(self):
        spec = tiny_spec(factor_set_count=2)
        result = run_training_suite(spec)
        series = result.summary["series"]["qcmrf_kl"]
        assert len(series["mean_tv"]) == 2
        assert len(series["final_window_tv_per_factor_set"]) == 2

    def test_reproducible(self):
        spec = tiny_spec(shots=20)
        a = run_training_suite(spec)
        b = run_training_suite(spec)
        for key in a.histories:
            assert np.array_equal(a.histories[key].loss, b.histories[key].loss)
            assert np.array_equal(a.histories[key].final_params,
                                  b.histories[key].final_params)

    def test_parallel_matches_serial(self):
        spec = tiny_spec(factor_set_count=2)
        serial = run_training_suite(spec, jobs=1)
        parallel = run_training_suite(spec, jobs=2)
        for key in serial.histories:
            assert np.array_equal(serial.histories[key].tv,
                                  parallel.histories[key].tv)

    def test_outputs_layout(self, tmp_path):
        spec = tiny_spec()
        result = run_training_suite(spec)
        base = write_suite_outputs(result, tmp_path)
        assert (base / "qcibm_kl_0.csv").exists()
        assert (base / "qcmrf_kl_0.params.json").exists()
        summary = json.loads((base / "summary.json").read_text())
        assert "qcmrf_kl" in summary["series"]

    def test_n_cap_enforced(self):
        g = generate_graph("loop", n=11)
        with pytest.raises(ValueError):
            ExperimentSpec(name="big", graph=g, cliques=maximal_cliques(g))

    def test_bbqc_model_supported(self):
        spec = tiny_spec(models=("bbqc",), losses=("kl",),
                         train=TrainConfig(epochs=1, seed=0, init="uniform"))
        result = run_training_suite(spec)
        assert (0, "bbqc", "kl") in result.histories


class TestDeriveSeed:
    def test_stable(self):
        assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)

    def test_distinct(self):
        seen = {derive_seed(0, "bench", i) for i in range(100)}
        assert len(seen) == 100


class TestVarianceScan:
    def test_param_draws_in_half_open_range(self):
        rng = np.random.default_rng(0)
        draws = np.concatenate([draw_scan_params(100, rng) for _ in range(200)])
        assert np.all(draws > -np.pi)
        assert np.all(draws <= np.pi)

    def test_rows_and_csv(self):
        res = run_variance_scan("triangle_chain", ns=[3, 4], factor_sets=2,
                                param_sets=20, shots=50, sample_count=50, seed=0)
        assert len(res.rows) == 4
        text = variance_rows_to_csv([res])
        lines = text.strip().splitlines()
        assert lines[0] == "graph_kind,n,factor_set,variance,min,max"
        assert len(lines) == 5

    def test_reproducible(self):
        kw = dict(ns=[3], factor_sets=1, param_sets=10, shots=20,
                  sample_count=20, seed=3)
        a = run_variance_scan("complete", **kw)
        b = run_variance_scan("complete", **kw)
        assert a.rows == b.rows

    def test_parallel_matches_serial(self):
        kw = dict(ns=[3, 4], factor_sets=2, param_sets=10, shots=20,
                  sample_count=20, seed=1)
        serial = run_variance_scan("complete", **kw)
        parallel = run_variance_scan("complete", jobs=2, **kw)
        assert serial.rows == parallel.rows

    def test_slope_computation(self):
        res = run_variance_scan("complete", ns=[3, 4, 5], factor_sets=2,
                                param_sets=100, shots=0, sample_count=100, seed=5)
        # one synthetic check: slope is the polyfit of mean log-variance
        pts = res.mean_log_variance()
        ns = np.array(sorted(pts), dtype=float)
        ys = np.array([pts[int(n)] for n in ns])
        assert res.slope() == pytest.approx(np.polyfit(ns, ys, 1)[0])

    def test_exact_mode_supported(self):
        res = run_variance_scan("triangle_chain", ns=[3], factor_sets=1,
                                param_sets=10, shots=0, sample_count=30, seed=2)
        assert res.rows[0]["variance"] >= 0

    def test_n_cap(self):
        with pytest.raises(ValueError):
            run_variance_scan("complete", ns=[13], factor_sets=1,
                              param_sets=1, shots=0, sample_count=10, seed=0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            run_variance_scan("petersen", ns=[4], factor_sets=1,
                              param_sets=1, shots=0, sample_count=10, seed=0)


class TestResourceScan:
    def test_triangle_worked_example(self):
        recs = run_resource_scan("loop", sizes=[3])
        assert recs[0]["qcmrf"]["depth"] == 16
        assert recs[0]["bbqc"]["depth"] == 72

    def test_loop_family_scaling(self):
        recs = run_resource_scan("loop", sizes=range(4, 13))
        q = [r["qcmrf"]["depth"] for r in recs]
        b = [r["bbqc"]["depth"] for r in recs]
        assert max(q) <= 12  # bounded, no growth in n
        assert all(y > x for x, y in zip(b, b[1:]))  # strictly increasing

    def test_kgram_family(self):
        recs = run_resource_scan("kgram", ks=range(2, 6), n=10)
        for rec in recs:
            assert rec["qcmrf"]["parameter_count"] == rec["bbqc"]["parameter_count"]
            if rec["k"] >= 3:
                assert rec["bbqc"]["depth"] >= 10 * rec["qcmrf"]["depth"]

    def test_records_serializable(self):
        recs = run_resource_scan("loop", sizes=[4, 5])
        json.dumps(recs)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            run_resource_scan("hypercube", sizes=[4])
