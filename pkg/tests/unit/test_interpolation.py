"""
Unit tests for the interpolation inequality checks.
"""
import math

import numpy as np
import pytest

from app.core.errors import ArgumentError
from app.services.interpolation import (
    additive_bound,
    check_interpolation,
    lipschitz_bound,
    piecewise_linear_norms,
    ratio,
)


@pytest.mark.unit
class TestBounds:
    """Test the bound formulas and exact norms."""

    def test_piecewise_linear_norms(self):
        """Test sup and L2 of the identity on [0,1]."""
        sup, l2 = piecewise_linear_norms(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 1.0]))

        assert sup == 1.0
        assert l2 == pytest.approx(math.sqrt(1.0 / 3.0))

    def test_bound_values(self):
        """Test the Lipschitz and additive constants."""
        assert lipschitz_bound(0.125, 8.0) == pytest.approx(2.0 * 0.25 * 2.0)
        assert additive_bound(0.125, 8.0, 3) == pytest.approx(15.0 * 0.25 * 2.0)

    def test_ratio_edge_cases(self):
        """Test 0/0 and x/0."""
        assert ratio(0.0, 0.0) == 0.0
        assert math.isinf(ratio(1.0, 0.0))
        assert ratio(1.0, 2.0) == 0.5


@pytest.mark.unit
class TestCheckInterpolation:
    """Test randomized sweeps."""

    @pytest.mark.parametrize("lip", [0.5, 1.0, 4.0])
    def test_lipschitz_holds(self, lip):
        """Test that no Lipschitz member violates its bound."""
        report = check_interpolation("lipschitz", lip=lip, samples=500, seed=1)

        assert report.violations == 0
        assert 0.0 < report.max_ratio <= 1.0
        assert report.constant == 2.0
        assert report.worst is not None

    @pytest.mark.parametrize("d", [2, 3])
    def test_additive_holds(self, d):
        """Test that no additive member violates its bound."""
        report = check_interpolation("additive", d=d, samples=300, seed=2)

        assert report.violations == 0
        assert report.constant == 5.0 * d

    def test_multiple_index_report(self):
        """Test a small multiple index sweep."""
        report = check_interpolation("multiple_index", samples=20, seed=3, resolution=16)

        assert report.samples == 20
        assert report.max_ratio > 0.0
        assert 0.0 < report.worst["angle"] <= math.pi / 3.0 + 1e-12

    def test_seed_determines_report(self):
        """Test that equal seeds give equal reports."""
        assert check_interpolation("lipschitz", samples=50, seed=9) == check_interpolation(
            "lipschitz", samples=50, seed=9
        )

    @pytest.mark.parametrize(
        "kwargs",
        [{"family": "sobolev"}, {"family": "lipschitz", "lip": 0.0}, {"family": "additive", "d": 0}],
    )
    def test_invalid_arguments(self, kwargs):
        """Test that bad families and parameters raise ArgumentError."""
        with pytest.raises(ArgumentError):
            check_interpolation(samples=5, **kwargs)
