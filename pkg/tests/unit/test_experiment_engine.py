"""
Unit tests for the Monte Carlo experiment engine.
"""
import numpy as np
import pytest

from app.core.config import settings
from app.core.errors import ArgumentError, ConfigurationError, FitError
from app.schemas import ExperimentSpec, ShapeClass
from app.services.experiment_engine import (
    default_hill_k,
    dyadic_thresholds,
    fit_rate_exponent,
    hill_estimator,
    misspecified_target,
    predict_for_spec,
    run_rate_experiment,
    run_replications,
    run_tail_experiment,
    sup_bound,
)


def _spec(tiny_spec, **update):
    data = tiny_spec.model_dump(by_alias=True)
    data.update(update)
    return ExperimentSpec.model_validate(data)


def _class_member(shape: ShapeClass, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A random member of the class evaluated on t."""
    a, b = 3.0 * rng.standard_normal(2)
    if shape.kind == "monotone":
        jumps = rng.exponential(size=t.size) * (rng.random(t.size) < 0.3)
        return a + np.cumsum(jumps)
    if shape.kind == "convex":
        hinge = rng.exponential() * np.maximum(t - rng.random(), 0.0)
        return a + b * t + hinge + rng.exponential() * (t - rng.random()) ** 2
    scale = shape.lip * rng.uniform(-1.0, 1.0)
    return a + scale * np.abs(t - rng.random()) ** shape.gamma


@pytest.mark.unit
class TestEstimators:
    """Test Hill and log-log slope estimators."""

    def test_hill_on_pareto(self, rng):
        """Test the Hill index of exact Pareto(3) draws."""
        values = (1.0 - rng.random(100_000)) ** (-1.0 / 3.0)

        assert hill_estimator(values, 2000) == pytest.approx(3.0, abs=0.2)

    def test_hill_errors(self):
        """Test too few values and a degenerate top."""
        with pytest.raises(ArgumentError):
            hill_estimator([1.0, 2.0], 5)
        with pytest.raises(FitError):
            hill_estimator(np.ones(10), 3)

    def test_default_k(self):
        """Test max(20, 5% of reps)."""
        assert default_hill_k(100) == 20
        assert default_hill_k(2000) == 100

    def test_rate_exponent(self):
        """Test the slope of a noisy power law."""
        ns = np.array([100.0, 300.0, 1000.0, 3000.0, 10000.0])
        medians = 2.0 * ns ** -0.5 * np.array([1.02, 0.98, 1.01, 0.99, 1.0])
        slope, (low, high), r2 = fit_rate_exponent(ns, medians)

        assert slope == pytest.approx(-0.5, abs=0.02)
        assert low <= slope <= high
        assert r2 > 0.99

    def test_rate_exponent_errors(self):
        """Test too few points and nonpositive medians."""
        with pytest.raises(FitError):
            fit_rate_exponent([10, 100], [0.1, 0.01])
        with pytest.raises(FitError):
            fit_rate_exponent([10, 100, 1000], [0.1, 0.0, 0.01])

    def test_dyadic_thresholds(self):
        """Test powers of two from the median to the maximum."""
        assert dyadic_thresholds(np.array([0.5, 1.0, 3.0])) == [1.0, 2.0, 4.0]
        assert dyadic_thresholds(np.zeros(3)) == [1.0]


@pytest.mark.unit
class TestPredictions:
    """Test regime selection for experiments."""

    def test_monotone_regimes(self, tiny_spec):
        """Test bracketing for a linear truth and VC for a constant one."""
        assert predict_for_spec(tiny_spec).exponent == pytest.approx(0.25)
        assert predict_for_spec(_spec(tiny_spec, f0="zero")).exponent == pytest.approx(0.5)

    def test_convex_regime(self, tiny_spec):
        """Test the convex bracketing parameters."""
        prediction = predict_for_spec(_spec(tiny_spec, **{"class": {"kind": "convex"}}))

        assert prediction.alpha == 0.5
        assert prediction.s == pytest.approx(2.0 / 3.0)

    def test_too_few_moments(self, tiny_spec):
        """Test that noise without a variance has no prediction."""
        with pytest.raises(ConfigurationError):
            predict_for_spec(_spec(tiny_spec, noise={"law": "student_t", "df": 1.5}))

    def test_sup_bound(self, tiny_spec):
        """Test the convex truncation C·sqrt(log n)."""
        convex = _spec(tiny_spec, **{"class": {"kind": "convex"}}, truncation_c=2.0)

        assert sup_bound(convex, 100) == pytest.approx(2.0 * np.sqrt(np.log(100)))
        assert sup_bound(tiny_spec, 100) is None

    def test_misspecified_target(self, monotone_class):
        """Test that the projected target is monotone."""
        target = misspecified_target(monotone_class, "sine", resolution=64)

        assert np.all(np.diff(target.values) >= -1e-12)

    def test_all_pairs_holder_target_with_default_settings(self):
        """Test that a γ < 1 target fits on the capped grid instead of failing."""
        target = misspecified_target(ShapeClass(kind="holder", gamma=0.5, lip=1.0), "sine")
        theta = target.values
        k = target.knots

        assert k.size == min(settings.MISSPEC_PAIRS_RESOLUTION, settings.HOLDER_MAX_N)
        gap = np.abs(theta[:, None] - theta[None, :]) - np.abs(k[:, None] - k[None, :]) ** 0.5
        assert gap.max() <= 1e-7

    def test_all_pairs_grid_respects_solver_cap(self, monkeypatch):
        """Test that HOLDER_MAX_N bounds the grid when it is the smaller cap."""
        monkeypatch.setattr(settings, "HOLDER_MAX_N", 40)

        target = misspecified_target(ShapeClass(kind="holder", gamma=0.5, lip=1.0), "sine", resolution=4096)

        assert target.knots.size == 40

    def test_monotone_target_keeps_full_resolution(self, monotone_class):
        """Test that classes without the all-pairs solver use the requested grid."""
        assert misspecified_target(monotone_class, "sine", resolution=300).knots.size == 300

    @pytest.mark.parametrize(
        "shape",
        [
            ShapeClass(kind="monotone"),
            ShapeClass(kind="convex"),
            ShapeClass(kind="holder", gamma=0.5, lip=1.0),
        ],
        ids=["monotone", "convex", "holder_half"],
    )
    def test_target_is_a_projection(self, shape, rng):
        """Test ⟨f0 − f̄, g − f̄⟩ ≤ 1e-6 on the grid for 100 random class members g."""
        m = 64
        t = (np.arange(m) + 0.5) / m
        target = misspecified_target(shape, "sine", resolution=m)
        center = target(t)
        residual = np.sin(2.0 * np.pi * t) - center

        for _ in range(100):
            g = _class_member(shape, t, rng)
            assert float(np.mean(residual * (g - center))) <= 1e-6


@pytest.mark.unit
class TestRuns:
    """Test replications and reports."""

    def test_rate_report(self, tiny_spec):
        """Test a serial run without the exponent fit."""
        report = run_rate_experiment(tiny_spec, workers=1, raw=True)

        assert [row.n for row in report.rows] == [16, 32]
        assert [(row.n, row.rep) for row in report.raw] == [(n, r) for n in (16, 32) for r in range(4)]
        assert report.fitted_exponent is None
        assert not report.degraded
        assert all(row.median_error > 0.0 for row in report.rows)

    def test_runs_are_reproducible(self, tiny_spec):
        """Test that equal seeds give identical reports."""
        assert run_rate_experiment(tiny_spec, workers=1) == run_rate_experiment(tiny_spec, workers=1)

    def test_serial_equals_parallel(self, tiny_spec):
        """Test that scheduling does not change the replications."""
        assert run_replications(tiny_spec, [16, 32], workers=1) == run_replications(tiny_spec, [16, 32], workers=2)

    def test_progress_callback(self, tiny_spec):
        """Test one progress line per n."""
        lines = []
        run_rate_experiment(tiny_spec, workers=1, progress=lines.append)

        assert len(lines) == 2 and lines[0].startswith("n=16")

    def test_noiseless_run_skips_fit(self, tiny_spec):
        """Test that a zero-noise run reports no exponent."""
        spec = _spec(tiny_spec, noise={"sigma_fn": {"sigma": 0.0}}, n_grid=[16, 512], reps=50, fit_rate=True)
        report = run_rate_experiment(spec, workers=1)

        assert report.fitted_exponent is None
        assert any("noiseless" in note for note in report.notes)

    def test_tail_needs_repetitions(self, tiny_spec):
        """Test that tail runs need at least 1000 repetitions."""
        with pytest.raises(ArgumentError):
            run_tail_experiment(tiny_spec, 32)
