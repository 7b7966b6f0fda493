"""
Unit tests for the noise laws and their diagnostics.
"""
import math

import numpy as np
import pytest

from app.core.errors import ArgumentError, ConfigurationError
from app.core.rng import replication_rng
from app.schemas import NoiseSpec
from app.services.noise_lab import (
    binned_second_moment,
    describe_noise,
    draw_errors,
    empirical_moment,
    law_moment,
    survival_slope,
    survival_two_moment_log,
)


@pytest.mark.unit
class TestDescribeNoise:
    """Test noise metadata."""

    @pytest.mark.parametrize(
        "spec, index",
        [
            (NoiseSpec(law="gaussian"), None),
            (NoiseSpec(law="student_t", df=3.0), 3.0),
            (NoiseSpec(law="sym_pareto", q_index=3.0), 3.0),
            (NoiseSpec(law="two_moment_log"), 2.0),
        ],
    )
    def test_moment_index(self, spec, index):
        """Test the reported moment index of each law."""
        assert describe_noise(spec).moment_index == index

    def test_pareto_needs_variance(self):
        """Test that sym_pareto with q <= 2 is rejected."""
        with pytest.raises(ConfigurationError):
            describe_noise(NoiseSpec(law="sym_pareto", q_index=2.0))

    def test_heavy_student_t_flags_cvar(self):
        """Test that student_t with df <= 2 violates the variance bound."""
        assert describe_noise(NoiseSpec(law="student_t", df=2.0)).cvar_ok is False
        with pytest.raises(ConfigurationError):
            describe_noise(NoiseSpec(law="student_t", df=2.0, sigma_fn={"kind": "xdep", "name": "linear"}))

    def test_sup_sigma(self):
        """Test that sup sigma comes from the scale function."""
        assert describe_noise(NoiseSpec(sigma_fn={"sigma": 0.3})).sup_sigma == pytest.approx(0.3)


@pytest.mark.unit
class TestLawMoments:
    """Test analytic moments of the standardized laws."""

    @pytest.mark.parametrize(
        "spec",
        [NoiseSpec(law="gaussian"), NoiseSpec(law="student_t", df=5.0), NoiseSpec(law="sym_pareto", q_index=3.0)],
    )
    def test_unit_variance(self, spec):
        """Test that standardized laws have unit variance."""
        assert law_moment(spec, 2.0) == pytest.approx(1.0, rel=1e-10)

    def test_moments_beyond_index_are_infinite(self):
        """Test infinite moments at and beyond the index."""
        assert math.isinf(law_moment(NoiseSpec(law="sym_pareto", q_index=3.0), 3.0))
        assert math.isinf(law_moment(NoiseSpec(law="student_t", df=2.5), 2.5))
        assert math.isinf(law_moment(NoiseSpec(law="two_moment_log"), 2.5))

    def test_two_moment_law_has_second_moment(self):
        """Test that the two-moment law has a finite second moment above one."""
        second = law_moment(NoiseSpec(law="two_moment_log"), 2.0)

        assert math.isfinite(second) and second > 1.0

    def test_two_moment_survival(self):
        """Test the two-moment survival function."""
        assert float(survival_two_moment_log(0.5)) == 1.0
        assert float(survival_two_moment_log(1.0)) == pytest.approx(1.0)
        assert float(survival_two_moment_log(10.0)) == pytest.approx(
            math.log(2.0) ** 2 / (100.0 * math.log(11.0) ** 2)
        )


@pytest.mark.unit
class TestDrawErrors:
    """Test error sampling."""

    def test_standardized_gaussian(self, rng):
        """Test mean and variance of gaussian errors."""
        e = draw_errors(NoiseSpec(), rng.uniform(size=200_000), rng)

        assert e.mean() == pytest.approx(0.0, abs=0.01)
        assert e.var() == pytest.approx(1.0, abs=0.02)

    def test_symmetric_pareto_variance(self, rng):
        """Test that sym_pareto(5) has unit variance."""
        e = draw_errors(NoiseSpec(law="sym_pareto", q_index=5.0), np.zeros(400_000), rng)

        assert e.var() == pytest.approx(1.0, abs=0.05)
        assert np.mean(e > 0) == pytest.approx(0.5, abs=0.01)

    def test_two_moment_law_survival(self, rng):
        """Test the empirical survival of two-moment magnitudes."""
        e = np.abs(draw_errors(NoiseSpec(law="two_moment_log"), np.zeros(200_000), rng))

        assert np.all(e >= 1.0)
        assert np.mean(e >= 4.0) == pytest.approx(float(survival_two_moment_log(4.0)), abs=0.003)

    def test_heteroscedastic_scale(self, rng):
        """Test conditional second moments under sigma(x) = 0.2 + 0.8x."""
        spec = NoiseSpec(sigma_fn={"kind": "xdep", "name": "linear"})
        x = rng.uniform(size=200_000)
        centers, second, se = binned_second_moment(x, draw_errors(spec, x, rng), bins=5)

        np.testing.assert_allclose(second, (0.2 + 0.8 * centers) ** 2, rtol=0.1)
        assert np.all(se > 0)

    def test_default_stream_uses_spec_seed(self):
        """Test that omitting the generator reproduces the NoiseSpec seed."""
        spec = NoiseSpec(seed=5)

        np.testing.assert_array_equal(draw_errors(spec, np.zeros(10)), draw_errors(spec, np.zeros(10)))


@pytest.mark.unit
class TestDiagnostics:
    """Test tail diagnostics and random streams."""

    def test_survival_slope_of_pareto(self, rng):
        """Test the top-decile slope of exact Pareto(3) data."""
        values = (1.0 - rng.random(100_000)) ** (-1.0 / 3.0)

        assert survival_slope(values, 0.1) == pytest.approx(-3.0, abs=0.15)

    def test_survival_slope_needs_points(self):
        """Test that tiny samples give no slope."""
        assert survival_slope([1.0, 2.0, 3.0], 0.1) is None

    def test_replication_streams(self):
        """Test that streams depend only on (seed, keys)."""
        a = replication_rng(7, 128, 3).random(5)
        b = replication_rng(7, 128, 3).random(5)
        c = replication_rng(7, 128, 4).random(5)

        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, c)

    def test_empirical_moment(self):
        """Test mean |e|^q and its argument checks."""
        assert empirical_moment([1.0, -2.0], 2.0) == pytest.approx(2.5)
        with pytest.raises(ArgumentError):
            empirical_moment([], 2.0)
        with pytest.raises(ArgumentError):
            empirical_moment([1.0], 0.5)
