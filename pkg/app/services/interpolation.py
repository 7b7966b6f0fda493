"""
Randomized checks of the sup-norm/L2 interpolation inequalities.

  lipschitz        ‖f‖_∞ ≤ 2‖f‖_2^{2/3} L^{1/3}
  additive         ‖f‖_∞ ≤ 5d‖f‖_2^{c} L^{1−c},  c = 2/3, f = Σ_j f_j(x_j)
  multiple_index   ‖m(θᵀx) − m0(θ0ᵀx)‖_∞ ≤ 10 C^{−c/2} ‖·‖_2^{c} L^{1−c}

Members are piecewise linear on 64 random knots with slopes drawn
uniformly from [−L, L]. Lipschitz members are shifted to vanish at a
random point and additive components are centered, which keeps ‖f‖_∞ of
the order of L.
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

import numpy as np

from app.core.errors import ArgumentError
from app.schemas.envelope import InterpolationReport

logger = logging.getLogger(__name__)

KNOTS = 64
EXPONENT = 2.0 / 3.0
FAMILIES = ("lipschitz", "additive", "multiple_index")


def lipschitz_bound(l2: float, lip: float) -> float:
    return 2.0 * l2 ** EXPONENT * lip ** (1.0 - EXPONENT)


def additive_bound(l2: float, lip: float, d: int) -> float:
    return 5.0 * d * l2 ** EXPONENT * lip ** (1.0 - EXPONENT)


def multiple_index_bound(l2: float, lip: float, density_floor: float) -> float:
    return 10.0 * density_floor ** (-EXPONENT / 2.0) * l2 ** EXPONENT * lip ** (1.0 - EXPONENT)


def piecewise_linear_norms(knots: np.ndarray, values: np.ndarray) -> Tuple[float, float]:
    """(sup, L2 over [knots[0], knots[-1]]) of the linear interpolant, exactly."""
    a, b = values[:-1], values[1:]
    h = np.diff(knots)
    l2 = math.sqrt(float(np.sum(h * (a * a + a * b + b * b)) / 3.0))
    return float(np.max(np.abs(values))), l2


def ratio(sup: float, bound: float) -> float:
    """sup/bound with 0/0 read as 0."""
    if sup == 0.0:
        return 0.0
    return math.inf if bound == 0.0 else sup / bound


def _random_member(rng: np.random.Generator, lip: float, lo: float = 0.0, hi: float = 1.0):
    knots = np.concatenate([[lo], np.sort(rng.uniform(lo, hi, KNOTS - 2)), [hi]])
    slopes = rng.uniform(-lip, lip, KNOTS - 1)
    values = np.concatenate([[0.0], np.cumsum(slopes * np.diff(knots))])
    return knots, values


def _lipschitz_sample(rng: np.random.Generator, lip: float) -> Tuple[float, float, dict]:
    knots, values = _random_member(rng, lip)
    values = values - np.interp(rng.uniform(), knots, values)
    sup, l2 = piecewise_linear_norms(knots, values)
    return sup, lipschitz_bound(l2, lip), {"sup": sup, "l2": l2}


def _centered(knots: np.ndarray, values: np.ndarray) -> np.ndarray:
    mean = float(np.sum(np.diff(knots) * (values[:-1] + values[1:])) / 2.0)
    return values - mean / (knots[-1] - knots[0])


def _additive_sample(rng: np.random.Generator, lip: float, d: int) -> Tuple[float, float, dict]:
    tops, bottoms, sq = 0.0, 0.0, 0.0
    for _ in range(d):
        knots, values = _random_member(rng, lip)
        values = _centered(knots, values)
        tops += float(values.max())
        bottoms += float(values.min())
        sq += piecewise_linear_norms(knots, values)[1] ** 2
    sup = max(tops, -bottoms)
    l2 = math.sqrt(sq)
    return sup, additive_bound(l2, lip, d), {"sup": sup, "l2": l2}


def _multiple_index_sample(
    rng: np.random.Generator, lip: float, grid: np.ndarray
) -> Tuple[float, float, dict]:
    a = rng.uniform(0.0, 2.0 * math.pi)
    b = a + rng.choice([-1.0, 1.0]) * rng.uniform(math.pi / 6.0, math.pi / 3.0)
    theta = np.array([math.cos(a), math.sin(a)])
    theta0 = np.array([math.cos(b), math.sin(b)])
    u, v = grid @ theta, grid @ theta0
    mk, mv = _random_member(rng, lip, float(u.min()), float(u.max()))
    nk, nv = _random_member(rng, lip, float(v.min()), float(v.max()))
    f = np.interp(u, mk, mv) - np.interp(v, nk, nv)
    f -= f[rng.integers(f.size)]
    sup = float(np.max(np.abs(f)))
    l2 = float(np.sqrt(np.mean(f * f)))
    # (θᵀX, θ0ᵀX) is uniform on a parallelogram of area |sin(b − a)|
    floor = 1.0 / abs(math.sin(b - a))
    return sup, multiple_index_bound(l2, lip, floor), {"sup": sup, "l2": l2, "angle": abs(b - a)}


def check_interpolation(
    family: str,
    lip: float = 1.0,
    d: int = 2,
    samples: int = 10_000,
    seed: int = 0,
    resolution: int = 64,
) -> InterpolationReport:
    """Sample members of a family and record the worst sup/bound ratio.

    Violations are findings, not errors. `d` applies to the additive
    family; `resolution` is the per-axis grid of the multiple index family.
    """
    if family not in FAMILIES:
        raise ArgumentError(f"unknown interpolation family {family!r}; choose from {FAMILIES}")
    if lip <= 0.0 or d < 1 or samples < 1:
        raise ArgumentError("need lip > 0, d >= 1 and samples >= 1")
    rng = np.random.default_rng(seed)
    grid: Optional[np.ndarray] = None
    if family == "multiple_index":
        axis = (np.arange(resolution) + 0.5) / resolution
        grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)

    worst_ratio, worst, violations = 0.0, None, 0
    for _ in range(samples):
        if family == "lipschitz":
            sup, bound, info = _lipschitz_sample(rng, lip)
        elif family == "additive":
            sup, bound, info = _additive_sample(rng, lip, d)
        else:
            sup, bound, info = _multiple_index_sample(rng, lip, grid)
        r = ratio(sup, bound)
        if r > 1.0:
            violations += 1
        if r > worst_ratio:
            worst_ratio, worst = r, {**info, "bound": bound}

    constant = {"lipschitz": 2.0, "additive": 5.0 * d, "multiple_index": 10.0}[family]
    if violations:
        logger.warning("%s: %d of %d samples violate the interpolation bound", family, violations, samples)
    return InterpolationReport(
        family=family,
        samples=samples,
        constant=constant,
        exponent=EXPONENT,
        max_ratio=worst_ratio,
        violations=violations,
        worst=worst,
    )
