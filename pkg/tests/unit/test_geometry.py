"""
Unit tests for samples, designs, truths and L2 geometry.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import ArgumentError, EvaluationError
from app.core.truths import truth
from app.models import FittedFn, Sample
from app.schemas import Design
from app.services.geometry import L2Norm, empirical_l2_distance, population_l2_distance


@pytest.mark.unit
class TestSample:
    """Test sample validation and tie merging."""

    def test_sorts_by_abscissa(self):
        """Test that x is sorted and y follows it."""
        sample = Sample.from_arrays([0.9, 0.1, 0.5], [3.0, 1.0, 2.0])

        np.testing.assert_array_equal(sample.x, [0.1, 0.5, 0.9])
        np.testing.assert_array_equal(sample.y, [1.0, 2.0, 3.0])
        assert not sample.has_ties

    def test_merges_ties(self):
        """Test that tied abscissae become one weighted mean."""
        sample = Sample.from_arrays([0.2, 0.2, 0.4], [1.0, 3.0, 5.0])
        knots, ybar, weights = sample.merged()

        assert sample.has_ties
        np.testing.assert_array_equal(knots, [0.2, 0.4])
        np.testing.assert_array_equal(ybar, [2.0, 5.0])
        np.testing.assert_array_equal(weights, [2.0, 1.0])

    @pytest.mark.parametrize(
        "x, y",
        [
            ([0.1], [1.0]),
            ([0.1, 0.2], [1.0]),
            ([0.1, 1.5], [1.0, 2.0]),
            ([0.1, 0.2], [1.0, math.nan]),
        ],
    )
    def test_rejects_invalid_input(self, x, y):
        """Test short, mismatched, out-of-range and non-finite samples."""
        with pytest.raises(ArgumentError):
            Sample.from_arrays(x, y)


@pytest.mark.unit
class TestDesign:
    """Test design draws and densities."""

    def test_uniform_draw_is_sorted_in_unit_interval(self, rng):
        """Test that uniform abscissae are sorted and in [0,1]."""
        x = Design().draw(rng, 500)

        assert x.size == 500
        assert np.all(np.diff(x) >= 0.0)
        assert x.min() >= 0.0 and x.max() <= 1.0

    def test_grid_uses_midpoints(self):
        """Test the grid01 design."""
        np.testing.assert_allclose(Design(kind="grid01").draw(n=4), [0.125, 0.375, 0.625, 0.875])

    def test_custom_density(self, rng):
        """Test a beta density design and its cdf."""
        design = Design(kind="custom-density", density={"name": "beta", "a": 2.0, "b": 5.0})
        x = design.draw(rng, 2000)

        assert not design.is_uniform
        assert x.mean() == pytest.approx(2.0 / 7.0, abs=0.02)
        assert float(design.cdf(1.0)) == pytest.approx(1.0)

    def test_density_requires_custom_kind(self):
        """Test that a density on a uniform design is rejected."""
        with pytest.raises(ValidationError):
            Design(kind="uniform01", density={"name": "beta"})

    def test_linear_density(self, rng):
        """Test the linear density 1 + slope·(x − ½): draws, cdf and mass."""
        design = Design(kind="custom-density", density={"name": "linear", "slope": 1.5})
        x = design.draw(rng, 20_000)

        # E X = 1/2 + slope/12, F(1/2) = 1/2 − slope/8
        assert x.mean() == pytest.approx(0.5 + 1.5 / 12.0, abs=0.01)
        assert float(design.cdf(0.5)) == pytest.approx(0.5 - 1.5 / 8.0, rel=1e-12)
        assert float(design.pdf(1.0)) == pytest.approx(1.75)
        assert x.min() >= 0.0 and x.max() <= 1.0

    @pytest.mark.parametrize("slope", [-2.0, 0.0, 2.0])
    def test_linear_density_edge_slopes(self, slope, rng):
        """Test that the extreme and flat slopes give finite draws in [0,1]."""
        design = Design(kind="custom-density", density={"name": "linear", "slope": slope})
        x = design.draw(rng, 1000)

        assert np.all(np.isfinite(x))
        assert float(design.cdf(1.0)) == pytest.approx(1.0)

    def test_linear_density_rejects_negative_mass(self):
        """Test that |slope| > 2 and unknown density names are rejected."""
        with pytest.raises(ValidationError):
            Design(kind="custom-density", density={"name": "linear", "slope": 2.5})
        with pytest.raises(ValidationError):
            Design(kind="custom-density", density={"name": "triangular"})


@pytest.mark.unit
class TestTruths:
    """Test the named truth registry."""

    def test_known_truths(self):
        """Test values of a few registered truths."""
        t = np.array([0.25, 0.75])

        np.testing.assert_allclose(truth("square")(t), t * t)
        np.testing.assert_allclose(truth("step")(t), [0.0, 1.0])
        assert truth("zero").constant
        assert truth("linear").affine and not truth("linear").constant

    def test_unknown_truth(self):
        """Test that an unknown name raises ArgumentError."""
        with pytest.raises(ArgumentError):
            truth("cubic")


@pytest.mark.unit
class TestL2Distance:
    """Test population and empirical L2 distances."""

    def test_exact_linear_against_square(self):
        """Test ‖x − x²‖ = sqrt(1/30) exactly."""
        fn = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

        assert population_l2_distance(fn, truth("square")) == pytest.approx(math.sqrt(1.0 / 30.0), rel=1e-12)

    def test_exact_matches_fine_quadrature(self, rng):
        """Test exact-piecewise against 10^4 quadrature panels on 100 piecewise-quadratic differences."""
        exact_norm = L2Norm(method="exact-piecewise")
        fine_norm = L2Norm(method="quadrature", panels=10_000)
        for k in range(100):
            n = int(rng.integers(1, 16))
            extension = "piecewise-constant-left" if k % 4 == 0 else "piecewise-linear-left-continuous"
            fn = FittedFn(np.sort(rng.uniform(size=n)), rng.standard_normal(n), extension)
            reference = truth(("square", "abs_centered", "linear")[k % 3])

            fine = fine_norm.distance(fn, reference)

            assert exact_norm.distance(fn, reference) == pytest.approx(fine, rel=1e-10)

    def test_step_functions(self):
        """Test the distance between two step functions."""
        fn = FittedFn(np.array([0.25, 0.75]), np.array([0.0, 1.0]), "piecewise-constant-left")

        # differs from 1{x > 1/2} on (1/4, 1/2]
        assert population_l2_distance(fn, truth("step")) == pytest.approx(0.5, rel=1e-12)

    def test_non_polynomial_truth(self):
        """Test the sine truth through quadrature: ‖sin 2πx‖ = 1/√2."""
        zero = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 0.0]))

        assert population_l2_distance(zero, truth("sine")) == pytest.approx(math.sqrt(0.5), rel=1e-8)

    def test_design_measure_weights_the_norm(self):
        """Test that the design density weights the norm: ‖x‖ = E[X²]^{1/2}."""
        design = Design(kind="custom-density", density={"name": "beta", "a": 2.0, "b": 2.0})
        zero = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 0.0]))

        # Beta(2,2): E X² = 3/10
        assert population_l2_distance(zero, truth("linear"), measure=design) == pytest.approx(
            math.sqrt(0.3), rel=1e-8
        )

    def test_linear_density_weights_the_norm(self):
        """Test ‖x‖ under 1 + slope·(x − ½): E[X²] = 1/3 + slope/12."""
        zero = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
        for slope in (-2.0, -0.5, 1.5):
            design = Design(kind="custom-density", density={"name": "linear", "slope": slope})

            assert population_l2_distance(zero, truth("linear"), measure=design) == pytest.approx(
                math.sqrt(1.0 / 3.0 + slope / 12.0), rel=1e-10
            )

    def test_is_a_metric(self, rng):
        """Test symmetry and the triangle inequality on random piecewise-linear triples."""

        def _random_fn():
            n = int(rng.integers(2, 12))
            knots = np.sort(rng.choice(np.arange(1, 1000), n, replace=False) / 1000.0)
            return FittedFn(knots, rng.standard_normal(n))

        for _ in range(200):
            f, g, h = _random_fn(), _random_fn(), _random_fn()
            fg = population_l2_distance(f, g)

            assert fg == pytest.approx(population_l2_distance(g, f), abs=1e-9)
            assert population_l2_distance(f, h) <= fg + population_l2_distance(g, h) + 1e-9
            assert population_l2_distance(f, f) <= 1e-9

    def test_empirical_distance(self):
        """Test the empirical norm at given abscissae."""
        fn = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 0.0]))

        assert empirical_l2_distance(fn, truth("linear"), [0.0, 1.0]) == pytest.approx(math.sqrt(0.5))

    def test_non_finite_reference(self):
        """Test that a non-finite reference raises EvaluationError."""
        fn = FittedFn(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(EvaluationError):
            empirical_l2_distance(fn, lambda t: np.full_like(t, np.inf), [0.5])
        with pytest.raises(ArgumentError):
            empirical_l2_distance(fn, truth("zero"), [])
