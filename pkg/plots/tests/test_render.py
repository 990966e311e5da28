import json
from pathlib import Path

import numpy as np
import pytest

from qcmrf_plots.render import (PlotInputError, PlotJob, build_figure, main,
                                render)

DATA = Path(__file__).parent / "data"


def job(kind, inputs, out, window=20):
    return PlotJob(tuple(str(DATA / p) for p in inputs), kind, str(out), window)


class TestTrainingCurves:
    def test_renders_nonempty_image(self, tmp_path):
        out = tmp_path / "curves.png"
        render(job("training_curves",
                   ["qcmrf_kl_0.csv", "qcmrf_kl_1.csv",
                    "qcibm_kl_0.csv", "qcibm_kl_1.csv"], out))
        assert out.exists() and out.stat().st_size > 0

    def test_groups_by_model_and_loss(self, tmp_path):
        fig, ax = build_figure(job("training_curves",
                                   ["qcmrf_kl_0.csv", "qcmrf_kl_1.csv",
                                    "qcibm_kl_0.csv", "qcibm_kl_1.csv"],
                                   tmp_path / "x.png"))
        labels = [ln.get_label() for ln in ax.get_lines()]
        assert "qcmrf (kl)" in labels and "qcibm (kl)" in labels
        assert len(ax.get_lines()) == 2  # factor sets averaged, not stacked

    def test_constant_series_is_flat_line(self, tmp_path):
        fig, ax = build_figure(job("training_curves", ["flat_tv.csv"],
                                   tmp_path / "flat.png"))
        ys = ax.get_lines()[0].get_ydata()
        assert np.allclose(ys, 0.25)

    def test_window_averaging_applied(self, tmp_path):
        fig, ax = build_figure(job("training_curves", ["qcmrf_kl_0.csv"],
                                   tmp_path / "w.png", window=20))
        raw = np.array([float(ln.split(",")[2]) for ln in
                        (DATA / "qcmrf_kl_0.csv").read_text().splitlines()[1:]])
        ys = ax.get_lines()[0].get_ydata()
        assert ys[-1] == pytest.approx(np.mean(raw[-20:]))

    def test_svg_output(self, tmp_path):
        out = tmp_path / "curves.svg"
        render(job("training_curves", ["qcmrf_kl_0.csv"], out))
        assert out.stat().st_size > 0


class TestVarianceScaling:
    def test_renders_nonempty_image(self, tmp_path):
        out = tmp_path / "var.png"
        render(job("variance_scaling", ["variance_complete.csv"], out))
        assert out.exists() and out.stat().st_size > 0

    def test_log_axis_and_error_bars(self, tmp_path):
        fig, ax = build_figure(job("variance_scaling", ["variance_complete.csv"],
                                   tmp_path / "v.png"))
        assert ax.get_yscale() == "log"
        assert len(ax.containers) >= 1  # errorbar container present

    def test_mean_points_log_equally_spaced(self, tmp_path):
        fig, ax = build_figure(job("variance_scaling", ["variance_complete.csv"],
                                   tmp_path / "v.png"))
        dashed = [ln for ln in ax.get_lines() if ln.get_linestyle() == "--"]
        ys = dashed[0].get_ydata()
        gaps = np.diff(np.log10(ys))
        assert np.allclose(gaps, gaps[0], atol=1e-9)


class TestDepthScaling:
    def test_renders_nonempty_image(self, tmp_path):
        out = tmp_path / "depth.png"
        render(job("depth_scaling", ["resources_loop.json"], out))
        assert out.exists() and out.stat().st_size > 0

    def test_flat_and_linear_series(self, tmp_path):
        fig, ax = build_figure(job("depth_scaling", ["resources_loop.json"],
                                   tmp_path / "d.png"))
        by_label = {ln.get_label(): ln.get_ydata() for ln in ax.get_lines()}
        qcmrf = by_label["qcmrf (loop)"]
        bbqc = by_label["bbqc (loop)"]
        assert len(set(qcmrf)) == 1  # flat
        assert all(b > a for a, b in zip(bbqc, bbqc[1:]))  # increasing
        diffs = set(np.diff(bbqc))
        assert len(diffs) == 1  # linear


class TestJobValidation:
    def test_unknown_kind(self, tmp_path):
        with pytest.raises(PlotInputError):
            PlotJob((str(DATA / "flat_tv.csv"),), "pie", str(tmp_path / "x.png"))

    def test_missing_input(self, tmp_path):
        with pytest.raises(PlotInputError):
            PlotJob((str(tmp_path / "nope.csv"),), "training_curves",
                    str(tmp_path / "x.png"))

    def test_schema_mismatch_fails(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(PlotInputError):
            build_figure(PlotJob((str(bad),), "training_curves",
                                 str(tmp_path / "x.png")))

    def test_rerun_overwrites_deterministically(self, tmp_path):
        out = tmp_path / "d.png"
        render(job("depth_scaling", ["resources_loop.json"], out))
        first = out.read_bytes()
        render(job("depth_scaling", ["resources_loop.json"], out))
        assert out.read_bytes() == first


class TestCliEntry:
    def test_main_success(self, tmp_path, capsys):
        rc = main([str(DATA / "variance_complete.csv"), "--kind",
                   "variance_scaling", "--out", str(tmp_path / "v.png")])
        assert rc == 0
        assert (tmp_path / "v.png").stat().st_size > 0

    def test_main_schema_error_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        rc = main([str(bad), "--kind", "depth_scaling",
                   "--out", str(tmp_path / "d.png")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
