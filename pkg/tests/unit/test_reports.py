"""
Unit tests for CSV I/O, figure data and manifests.
"""
import json
import math

import numpy as np
import pandas as pd
import pytest

from app.core.errors import ArgumentError
from app.schemas import RunConfig, TailCurve, TailReport
from app.services.experiment_engine import run_rate_experiment
from app.services.reports import (
    build_manifest,
    emit_figure_data,
    figure_csv,
    json_text,
    read_manifest,
)
from app.utils import frame_text, read_frame, read_xy


@pytest.mark.unit
class TestCsv:
    """Test lossless CSV text."""

    def test_round_trip_is_bit_exact(self, rng, tmp_path):
        """Test that written reals re-parse to the same bits."""
        frame = pd.DataFrame({"a": rng.standard_normal(50), "b": rng.uniform(size=50) * 1e-300})
        path = tmp_path / "frame.csv"
        path.write_text(frame_text(frame))

        back = read_frame(path)
        np.testing.assert_array_equal(back["a"].to_numpy(), frame["a"].to_numpy())
        np.testing.assert_array_equal(back["b"].to_numpy(), frame["b"].to_numpy())

    def test_read_xy(self, tmp_path):
        """Test reading fit input."""
        path = tmp_path / "xy.csv"
        path.write_text("x,y\n0.1,2\n0.2,1\n")

        x, y = read_xy(path)
        np.testing.assert_array_equal(x, [0.1, 0.2])
        np.testing.assert_array_equal(y, [2.0, 1.0])

    @pytest.mark.parametrize("content", ["a,b\n1,2\n", "x,y\n0.1,abc\n"])
    def test_read_xy_errors(self, tmp_path, content):
        """Test missing columns and non-numeric cells."""
        path = tmp_path / "bad.csv"
        path.write_text(content)
        with pytest.raises(ArgumentError):
            read_xy(path)

    def test_read_xy_missing_file(self, tmp_path):
        """Test that a missing file raises ArgumentError."""
        with pytest.raises(ArgumentError):
            read_xy(tmp_path / "absent.csv")


@pytest.mark.unit
class TestFigures:
    """Test plot-ready frames."""

    def test_rate_loglog_without_fit(self, tiny_spec):
        """Test that the fit line is NaN without a fitted exponent."""
        frame = emit_figure_data("rate_loglog", run_rate_experiment(tiny_spec, workers=1))

        assert list(frame.columns) == ["log_n", "log_median_error", "fit_line"]
        np.testing.assert_allclose(frame["log_n"], np.log([16, 32]))
        assert frame["fit_line"].isna().all()

    def test_rate_loglog_line_through_centroid(self, tiny_spec):
        """Test that the fit line passes through the mean point."""
        report = run_rate_experiment(tiny_spec, workers=1).model_copy(update={"fitted_exponent": -0.5})
        frame = emit_figure_data("rate_loglog", report)

        assert frame["fit_line"].mean() == pytest.approx(frame["log_median_error"].mean())
        assert frame["fit_line"].iloc[1] - frame["fit_line"].iloc[0] == pytest.approx(-0.5 * math.log(2.0))

    def test_tail_survival(self, tiny_spec):
        """Test that zero survivals are omitted and dropped thresholds flagged."""
        curve = TailCurve(law="main", scaled_errors=[], survival=[0.5, 0.1, 0.0], hill_index=None, hill_k=20)
        twin = TailCurve(law="gaussian", scaled_errors=[], survival=[0.4, 0.0, 0.0], hill_index=None, hill_k=20)
        report = TailReport(
            spec=tiny_spec,
            n=32,
            reps=1000,
            rate_exponent=0.25,
            thresholds=[1.0, 2.0, 4.0],
            dropped_thresholds=[2.0, 4.0],
            main=curve,
            twin=twin,
        )
        frame = emit_figure_data("tail_survival", report)

        assert list(frame["law"]) == ["main", "main", "gaussian"]
        assert list(frame["in_slope"]) == [True, False, True]
        assert frame["log_survival"].iloc[0] == pytest.approx(math.log(0.5))

    def test_envelope_band_passthrough(self):
        """Test column selection and validation of band frames."""
        band = pd.DataFrame({"x": [0.5], "upper": [1.0], "lower": [-1.0], "center": [0.0], "delta": [0.1]})

        assert figure_csv("envelope_band", band) == "delta,x,center,lower,upper\n0.10000000000000001,0.5,0,-1,1\n"
        with pytest.raises(ArgumentError):
            emit_figure_data("envelope_band", band.drop(columns="upper"))

    def test_unknown_kind(self):
        """Test that unknown kinds and mismatched sources raise ArgumentError."""
        with pytest.raises(ArgumentError):
            emit_figure_data("histogram", pd.DataFrame())
        with pytest.raises(ArgumentError):
            emit_figure_data("rate_loglog", pd.DataFrame())


@pytest.mark.unit
class TestManifest:
    """Test manifests and JSON text."""

    def test_manifest_fields(self):
        """Test that the manifest records argv, seeds and sorted outputs."""
        config = RunConfig(command="tables", argv=["tables"])
        manifest = build_manifest(config, ["table2.csv", "table1.csv"], {"seed": 1})

        assert manifest["argv"] == ["tables"]
        assert manifest["outputs"] == ["table1.csv", "table2.csv"]
        assert manifest["seeds"] == {"seed": 1}
        assert "numpy" in manifest["versions"]

    def test_json_text_is_canonical(self):
        """Test sorted keys and rejection of NaN."""
        assert json_text({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'
        with pytest.raises(ValueError):
            json_text({"a": float("nan")})

    def test_read_manifest(self, tmp_path):
        """Test loading and validating a stored manifest."""
        good = tmp_path / "manifest.json"
        good.write_text(json.dumps({"argv": ["tables"]}))
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"command": "tables"}))

        assert read_manifest(good)["argv"] == ["tables"]
        with pytest.raises(ArgumentError):
            read_manifest(bad)
        with pytest.raises(ArgumentError):
            read_manifest(tmp_path / "absent.json")
