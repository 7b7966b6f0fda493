"""
Unit tests for local envelopes: closed forms, the grid oracle and profiles.
"""
import math

import numpy as np
import pytest

from app.core.errors import ArgumentError, CapabilityError
from app.core.truths import truth
from app.models import FittedFn
from app.schemas import Design, ShapeClass
from app.services.envelope_lab import (
    build_profile,
    convex_envelope_l3_bound,
    effective_phi,
    envelope_analytic,
    envelope_band,
    envelope_directional,
    envelope_oracle,
    envelope_projected_gradient,
    fit_growth_exponent,
)
from app.services.geometry import population_l2_distance


@pytest.mark.unit
class TestEnvelopeAnalytic:
    """Test the closed-form envelopes."""

    def test_monotone_constant_center(self, monotone_class):
        """Test δ/√P[x,1] at the midpoint."""
        value = envelope_analytic(monotone_class, "zero", 0.1, 0.5)

        assert value == pytest.approx(0.1 / math.sqrt(0.5), abs=1e-6)
        assert value == pytest.approx(0.141421, abs=1e-6)

    def test_monotone_uses_the_lighter_side(self, monotone_class):
        """Test δ·min(P[0,x], P[x,1])^{-1/2} off center, attained by a step on the lighter side."""
        value = envelope_analytic(monotone_class, "zero", 0.1, 0.2)
        step = FittedFn(np.array([0.2, 1.0]), np.array([-value, 0.0]), "piecewise-constant-left")

        assert value == pytest.approx(0.1 / math.sqrt(0.2), rel=1e-12)
        assert value > 0.1 / math.sqrt(0.8)
        assert population_l2_distance(step, truth("zero")) == pytest.approx(0.1, rel=1e-12)

    def test_monotone_is_capped_by_the_box(self, monotone_class):
        """Test that the envelope never exceeds Φ − c."""
        assert envelope_analytic(monotone_class, "zero", 0.5, 0.99) == pytest.approx(1.0)

    def test_zero_radius(self, convex_class):
        """Test that δ = 0 gives a zero envelope."""
        assert envelope_analytic(convex_class, "zero", 0.0, 0.3) == 0.0

    def test_lipschitz_sup_bound(self, lipschitz_class):
        """Test 2δ^{2/3}L^{1/3} with L doubled for non-constant centers."""
        assert envelope_analytic(lipschitz_class, "zero", 0.1, 0.5) == pytest.approx(2.0 * 0.1 ** (2.0 / 3.0))
        assert envelope_analytic(lipschitz_class, "linear", 0.1, 0.5) == pytest.approx(
            2.0 * 0.1 ** (2.0 / 3.0) * 2.0 ** (1.0 / 3.0)
        )

    def test_cones_default_to_unit_box(self, monotone_class, lipschitz_class):
        """Test Φ = 1 for cones and no box for Hölder classes."""
        assert effective_phi(monotone_class) == 1.0
        assert effective_phi(ShapeClass(kind="convex", phi=3.0)) == 3.0
        assert effective_phi(lipschitz_class) is None

    @pytest.mark.parametrize(
        "shape, center, design",
        [
            (ShapeClass(kind="monotone"), "linear", None),
            (ShapeClass(kind="convex"), "zero", Design(kind="custom-density", density={"name": "beta"})),
            (ShapeClass(kind="holder", gamma=0.5, lip=1.0), "zero", None),
        ],
    )
    def test_missing_closed_form(self, shape, center, design):
        """Test that unsupported combinations raise CapabilityError."""
        with pytest.raises(CapabilityError):
            envelope_analytic(shape, center, 0.1, 0.5, design)

    @pytest.mark.parametrize("delta, x", [(-0.1, 0.5), (0.1, 1.5), (math.inf, 0.5)])
    def test_invalid_arguments(self, monotone_class, delta, x):
        """Test that bad δ or x raise ArgumentError."""
        with pytest.raises(ArgumentError):
            envelope_analytic(monotone_class, "zero", delta, x)

    def test_l3_bound(self):
        """Test the convex L3 envelope bound and its domain."""
        expected = 4.0 * 0.1 ** (2.0 / 3.0) * math.log(1.0 / 0.02) ** (1.0 / 3.0)

        assert convex_envelope_l3_bound(1.0, 0.1) == pytest.approx(expected)
        with pytest.raises(ArgumentError):
            convex_envelope_l3_bound(1.0, 0.8)


@pytest.mark.unit
class TestEnvelopeOracle:
    """Test the grid oracle against closed forms and projected gradient."""

    @pytest.mark.parametrize("delta", [0.02, 0.1, 0.3])
    @pytest.mark.parametrize("x", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_monotone_matches_closed_form(self, monotone_class, delta, x):
        """Test oracle and closed form within 5% around a constant center."""
        oracle = envelope_oracle(monotone_class, "zero", delta, x, grid_m=256)

        assert oracle == pytest.approx(envelope_analytic(monotone_class, "zero", delta, x), rel=0.05)

    @pytest.mark.parametrize("delta", [0.05, 0.1])
    @pytest.mark.parametrize("x", [0.25, 0.5, 0.75])
    def test_convex_below_bound(self, convex_class, delta, x):
        """Test that the convex oracle stays under the closed-form bound."""
        oracle = envelope_oracle(convex_class, "zero", delta, x, grid_m=64)

        assert 0.0 < oracle <= 1.1 * envelope_analytic(convex_class, "zero", delta, x)

    def test_directions_are_nonnegative(self, monotone_class):
        """Test that both one-sided values are nonnegative and ordered at x > ½."""
        up, down = envelope_directional(monotone_class, "zero", 0.1, 0.8, grid_m=64)

        assert up >= down >= 0.0

    def test_non_constant_center(self, monotone_class):
        """Test the boundary search around a linear center."""
        up, down = envelope_directional(monotone_class, "linear", 0.05, 0.5, grid_m=64)

        assert 0.0 < up <= 1.0 - 0.5 + 1e-9
        assert 0.0 < down <= 1.0 + 0.5 + 1e-9

    def test_lipschitz_box(self):
        """Test a boxed Lipschitz class through least distance programming."""
        shape = ShapeClass(kind="holder", gamma=1.0, lip=1.0, phi=0.5)
        value = envelope_oracle(shape, "zero", 0.1, 0.5, grid_m=32)

        assert 0.0 < value <= min(1.0, envelope_analytic(shape, "zero", 0.1, 0.5)) + 1e-6

    def test_projected_gradient_agrees(self, monotone_class):
        """Test projected gradient against the oracle's cone direction."""
        rng = np.random.default_rng(3)
        pg = envelope_projected_gradient("monotone", 0.5, 0.1, grid_m=64, starts=3, rng=rng)
        up, _ = envelope_directional(monotone_class, "zero", 0.1, 0.5, grid_m=64)

        assert pg == pytest.approx(up, rel=1e-3)

    def test_rejects_small_grid(self, monotone_class):
        """Test that grids below 32 points are refused."""
        with pytest.raises(ArgumentError):
            envelope_oracle(monotone_class, "zero", 0.1, 0.5, grid_m=16)

    def test_rejects_center_outside_class(self, monotone_class):
        """Test that a non-monotone center is refused."""
        with pytest.raises(ArgumentError):
            envelope_oracle(monotone_class, "sine", 0.1, 0.5, grid_m=64)


@pytest.mark.unit
class TestProfiles:
    """Test envelope profiles, growth fits and bands."""

    def test_lipschitz_growth_exponent(self, lipschitz_class):
        """Test that the fitted exponent of 2δ^{2/3} is exactly 2/3."""
        profile = build_profile(lipschitz_class, "zero", method="analytic", grid_m=32)
        s_hat, nu_hat, r2 = fit_growth_exponent(profile)

        assert profile.s_hat == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert s_hat == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert nu_hat == pytest.approx(0.0, abs=1e-6)
        assert r2 == pytest.approx(1.0)

    def test_norm_ordering(self, monotone_class):
        """Test sup ≥ L3 ≥ L2 at every δ."""
        profile = build_profile(monotone_class, "zero", deltas=[0.05, 0.1, 0.2], grid_m=64)

        for sup, l2, l3 in zip(profile.norm_sup, profile.norm_l2, profile.norm_l3):
            assert sup + 1e-12 >= l3 >= l2 - 1e-12
        assert profile.s_hat is None

    def test_x_points(self, lipschitz_class):
        """Test that explicit points replace the grid."""
        profile = build_profile(lipschitz_class, "zero", deltas=[0.1], method="analytic", x_points=[0.5])

        assert profile.norm_sup == profile.norm_l2 == profile.norm_l3

    def test_unknown_method(self, monotone_class):
        """Test that an unknown method raises ArgumentError."""
        with pytest.raises(ArgumentError):
            build_profile(monotone_class, "zero", method="exact")

    def test_bands_are_nested(self, monotone_class):
        """Test that bands widen with δ and contain the center."""
        band = envelope_band(monotone_class, "zero", [0.05, 0.2], grid_m=32)
        narrow = band[band["delta"] == 0.05].reset_index(drop=True)
        wide = band[band["delta"] == 0.2].reset_index(drop=True)

        assert list(band.columns) == ["delta", "x", "center", "lower", "upper"]
        assert np.all(narrow["lower"] <= narrow["center"]) and np.all(narrow["center"] <= narrow["upper"])
        assert np.all(wide["upper"] >= narrow["upper"] - 1e-9)
        assert np.all(wide["lower"] <= narrow["lower"] + 1e-9)
