"""
Local envelopes F_δ(x) = sup{|f(x) − f0(x)| : f ∈ F, ‖f − f0‖ ≤ δ}.

Closed forms are available for a few (class, center) pairs; everything
else goes through the grid oracle. The oracle works on the midpoint grid
t_j = (j + ½)/m with ‖g‖²_grid = (1/m) Σ g(t_j)², and looks at the
spike direction c = ±m·e_k, for which ⟨c, g⟩_grid = ±g(t_k):

  - pure cones around a center in their lineality space: Moreau,
    sup{⟨c, g⟩ : g ∈ K, ‖g‖ ≤ δ} = δ‖Π_K(c)‖
  - otherwise the boundary point Π_C(f0 + τc) with ‖Π_C(f0 + τc) − f0‖ = δ,
    found by Brent's method on log τ.

Φ = None means "no box" for Hölder classes and Φ = 1 for the cones.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy import optimize

from app.core.config import settings
from app.core.errors import ArgumentError, CapabilityError, ConvergenceError, FitError
from app.core.truths import Truth, truth
from app.models import ConeConstraint
from app.schemas.design import Design
from app.schemas.envelope import EnvelopeProfile
from app.schemas.shape import ShapeClass
from app.services import projections
from app.services.interpolation import check_interpolation  # noqa: F401  re-exported
from app.services.shape_solvers import project_cone

logger = logging.getLogger(__name__)

Center = Union[str, Truth]

DEFAULT_DELTAS: Tuple[float, ...] = tuple(float(d) for d in np.geomspace(0.01, 0.5, 12))
MIN_GRID = 32
_LOG_SPAN = 18.0 * math.log(10.0)


def grid_points(m: int) -> np.ndarray:
    """Midpoint grid (j + ½)/m, j = 0..m−1."""
    return (np.arange(m) + 0.5) / m


def _center(center: Center) -> Truth:
    return center if isinstance(center, Truth) else truth(center)


def _check(delta: float, x: float) -> None:
    if delta < 0.0 or not math.isfinite(delta):
        raise ArgumentError(f"delta must be a finite nonnegative number, got {delta}")
    if not 0.0 <= x <= 1.0:
        raise ArgumentError(f"x must lie in [0, 1], got {x}")


def effective_phi(shape_class: ShapeClass) -> Optional[float]:
    if shape_class.is_cone:
        return 1.0 if shape_class.phi is None else shape_class.phi
    return shape_class.phi


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def envelope_analytic(
    shape_class: ShapeClass,
    center: Center,
    delta: float,
    x: float,
    design: Optional[Design] = None,
) -> float:
    """Closed-form envelope value (or bound) at a single point.

    monotone, constant center c: min{Φ − c, δ/√P[x,1]} upwards and
    min{Φ + c, δ/√P[0,x]} downwards; the larger one is returned. At c = 0
    that is δ·min(P[0,x], P[x,1])^{−1/2}, set by the lighter side: a step
    of height δ/√P on that side stays in the δ-ball. Using the heavier side
    (max of the two masses) understates the supremum and is not the envelope.
    convex (uniform design): min{2(2Φ)^{1/3} δ^{2/3} max(x^{−1/3}, (1−x)^{−1/3}), 2Φ}.
    Lipschitz (γ = 1): the sup-norm bound 2δ^{2/3}L_g^{1/3}, L_g = L for
    constant centers and 2L otherwise, capped at 2Φ when Φ is set.

    Raises:
        CapabilityError: no closed form for this (class, center, design)
    """
    _check(delta, x)
    if delta == 0.0:
        return 0.0
    f0 = _center(center)
    design = design or Design()
    phi = effective_phi(shape_class)

    if shape_class.kind == "monotone":
        if not f0.constant:
            raise CapabilityError(
                f"no closed-form monotone envelope around {f0.name!r}; use --method oracle"
            )
        c = float(f0(x))
        below = float(design.cdf(x))
        above = 1.0 - below
        up = phi - c if above <= 0.0 else min(phi - c, delta / math.sqrt(above))
        down = phi + c if below <= 0.0 else min(phi + c, delta / math.sqrt(below))
        return max(up, down, 0.0)

    if shape_class.kind == "convex":
        if not design.is_uniform:
            raise CapabilityError("the convex envelope bound holds for the uniform design only; use the oracle")
        edge = max(
            x ** (-1.0 / 3.0) if x > 0.0 else math.inf,
            (1.0 - x) ** (-1.0 / 3.0) if x < 1.0 else math.inf,
        )
        return float(min(2.0 * (2.0 * phi) ** (1.0 / 3.0) * delta ** (2.0 / 3.0) * edge, 2.0 * phi))

    if shape_class.gamma == 1.0:
        lip = shape_class.lip if f0.constant else 2.0 * shape_class.lip
        value = 2.0 * delta ** (2.0 / 3.0) * lip ** (1.0 / 3.0)
        return value if phi is None else min(value, 2.0 * phi)

    raise CapabilityError(f"no closed-form envelope for {shape_class.label()}; use the oracle")


def convex_envelope_l3_bound(phi: float, delta: float) -> float:
    """4Φ^{1/3}δ^{2/3}[log(Φ²/(2δ²))]^{1/3}, valid for δ < Φ/√2."""
    if phi <= 0.0 or delta <= 0.0 or delta >= phi / math.sqrt(2.0):
        raise ArgumentError(f"need 0 < delta < phi/sqrt(2), got phi={phi}, delta={delta}")
    return 4.0 * phi ** (1.0 / 3.0) * delta ** (2.0 / 3.0) * math.log(phi * phi / (2.0 * delta * delta)) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Grid projections
# ---------------------------------------------------------------------------


def _ldp(G: np.ndarray, h: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    w = np.ones(G.shape[1])

    def _project(v: np.ndarray) -> np.ndarray:
        theta, _, status = projections.ldp_projection(v, w, G, h)
        if status != "converged":
            raise ConvergenceError(f"least distance projection failed ({status})")
        return theta

    return _project


def _box_rows(m: int, phi: float, upper_at: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    eye = np.eye(m)
    upper = eye if upper_at is None else eye[upper_at]
    G = np.vstack([upper, -eye])
    return G, np.full(G.shape[0], phi)


def grid_projector(shape_class: ShapeClass, m: int) -> Callable[[np.ndarray], np.ndarray]:
    """Euclidean projection onto the class ∩ box sampled on the m-point grid.

    The monotone box intersection converges in a couple of Dykstra sweeps;
    convex and Lipschitz boxes are small polyhedra and are projected
    exactly by least distance programming.
    """
    t = grid_points(m)
    w = np.ones(m)
    phi = effective_phi(shape_class)
    tol, max_iter = settings.SOLVER_TOLERANCE, settings.SOLVER_MAX_ITER

    def _with_box(base: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
        clip = projections.box(phi)

        def _project(v: np.ndarray) -> np.ndarray:
            theta, _, _, status = projections.dykstra(
                v, base, clip, tol=settings.DYKSTRA_TOLERANCE, max_iter=settings.DYKSTRA_MAX_ITER
            )
            if status != "converged":
                raise ConvergenceError("Dykstra projection onto class ∩ box did not converge")
            return theta

        return _project

    if shape_class.kind == "monotone":
        return _with_box(lambda v: projections.pava(v, w))

    if shape_class.kind == "convex":
        G_box, h_box = _box_rows(m, phi, upper_at=np.array([0, m - 1]))
        G = np.vstack([-np.diff(np.eye(m), n=2, axis=0), G_box])
        return _ldp(G, np.concatenate([np.zeros(m - 2), h_box]))

    lip = shape_class.lip
    if shape_class.gamma == 1.0:
        if phi is None:
            return lambda v: projections.lipschitz_projection(t, v, w, lip, tol, max_iter)[0]
        d1 = np.diff(np.eye(m), axis=0)
        G_box, h_box = _box_rows(m, phi)
        G = np.vstack([d1, -d1, G_box])
        h = np.concatenate([np.full(2 * (m - 1), lip / m), h_box])
        return _ldp(G, h)

    gamma = shape_class.gamma
    base = lambda v: projections.holder_pairs_projection(t, v, w, gamma, lip, tol, max_iter)[0]  # noqa: E731
    return base if phi is None else _with_box(base)


@lru_cache(maxsize=4096)
def _cone_direction(kind: str, m: int, k: int, sign: int) -> Tuple[float, np.ndarray]:
    """(‖Π_K(c)‖_grid, Π_K(c)) for the spike c = sign·m·e_k."""
    cone_kind = "monotone" if kind == "monotone" else "convex-second-difference"
    c = np.zeros(m)
    c[k] = sign * m
    pi = project_cone(c, ConeConstraint(cone_kind, grid_points(m)))
    pi.flags.writeable = False
    return float(np.sqrt(np.mean(pi * pi))), pi


def _moreau_applies(shape_class: ShapeClass, f0: Truth) -> bool:
    return (shape_class.kind == "monotone" and f0.constant) or (
        shape_class.kind == "convex" and f0.affine
    )


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


class _GridOracle:
    """Envelope oracle for one (class, center, m)."""

    def __init__(self, shape_class: ShapeClass, center: Center, grid_m: int):
        if grid_m < MIN_GRID:
            raise ArgumentError(f"grid_m must be at least {MIN_GRID}, got {grid_m}")
        self.shape_class = shape_class
        self.f0 = _center(center)
        self.m = int(grid_m)
        self.t = grid_points(self.m)
        self.f0v = self.f0(self.t)
        self.phi = effective_phi(shape_class)
        self.moreau = _moreau_applies(shape_class, self.f0)
        self._project: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def project(self) -> Callable[[np.ndarray], np.ndarray]:
        if self._project is None:
            self._project = grid_projector(self.shape_class, self.m)
            gap = self._norm(self._project(self.f0v) - self.f0v)
            if gap > 1e-6 * max(1.0, float(np.max(np.abs(self.f0v)))):
                raise ArgumentError(
                    f"center {self.f0.name!r} is not in {self.shape_class.label()} (grid distance {gap:.3g})"
                )
        return self._project

    def _norm(self, g: np.ndarray) -> float:
        return float(np.sqrt(np.mean(g * g)))

    def cell(self, x: float) -> int:
        return int(np.clip(math.floor(x * self.m), 0, self.m - 1))

    def _in_box(self, f: np.ndarray) -> bool:
        return self.phi is None or bool(np.all(np.abs(f) <= self.phi * (1.0 + 1e-12)))

    def directional(self, delta: float, k: int, sign: int) -> float:
        if delta == 0.0:
            return 0.0
        if self.moreau:
            norm, pi = _cone_direction(self.shape_class.kind, self.m, k, sign)
            if norm <= 0.0:
                return 0.0
            if self._in_box(self.f0v + (delta / norm) * pi):
                return delta * norm
        return self._boundary(delta, k, sign)

    def _boundary(self, delta: float, k: int, sign: int) -> float:
        spike = np.zeros(self.m)
        spike[k] = sign * self.m
        project, f0v = self.project, self.f0v

        def _point(s: float) -> np.ndarray:
            return project(f0v + delta * math.exp(s) * spike)

        def _excess(s: float) -> float:
            return self._norm(_point(s) - f0v) - delta

        s_lo, s_hi = -_LOG_SPAN, _LOG_SPAN
        if _excess(s_hi) <= 0.0:
            root = s_hi
        else:
            try:
                root, info = optimize.brentq(
                    _excess, s_lo, s_hi, xtol=settings.ORACLE_TOLERANCE, maxiter=settings.ORACLE_MAX_STEPS, full_output=True
                )
            except (RuntimeError, ValueError) as exc:
                raise ConvergenceError(f"envelope oracle root search failed: {exc}") from exc
            if not info.converged:
                raise ConvergenceError(f"envelope oracle did not converge in {settings.ORACLE_MAX_STEPS} steps")
        f = _point(root)
        return max(0.0, sign * float(f[k] - f0v[k]))

    def pair(self, delta: float, x: float) -> Tuple[float, float]:
        k = self.cell(x)
        return self.directional(delta, k, 1), self.directional(delta, k, -1)


def envelope_directional(
    shape_class: ShapeClass,
    center: Center,
    delta: float,
    x: float,
    grid_m: int = 256,
) -> Tuple[float, float]:
    """One-sided envelope values (upper, lower) at x, both ≥ 0.

    Raises:
        ArgumentError: grid_m < 32, δ < 0, x ∉ [0, 1] or a center outside the class
        ConvergenceError: the root search did not converge
    """
    _check(delta, x)
    return _GridOracle(shape_class, center, grid_m).pair(delta, x)


def envelope_oracle(
    shape_class: ShapeClass,
    center: Center,
    delta: float,
    x: float,
    grid_m: int = 256,
) -> float:
    """Grid-oracle envelope F_δ(x): the larger of the two directions."""
    return max(envelope_directional(shape_class, center, delta, x, grid_m))


def envelope_projected_gradient(
    kind: str,
    x: float,
    delta: float,
    grid_m: int = 128,
    starts: int = 20,
    rng: Optional[np.random.Generator] = None,
    steps: int = 500,
    sign: int = 1,
) -> float:
    """sup{sign·g(x) : g ∈ K, ‖g‖_grid ≤ δ} by projected gradient.

    For a cone K and a ball B at the origin Π_{K∩B} = Π_B∘Π_K, so every
    step is an exact projection.
    """
    _check(delta, x)
    if grid_m < MIN_GRID:
        raise ArgumentError(f"grid_m must be at least {MIN_GRID}, got {grid_m}")
    rng = rng or np.random.default_rng(0)
    cone = ConeConstraint("monotone" if kind == "monotone" else "convex-second-difference", grid_points(grid_m))
    k = int(np.clip(math.floor(x * grid_m), 0, grid_m - 1))
    ascent = np.zeros(grid_m)
    ascent[k] = sign * math.sqrt(grid_m) * delta

    def _feasible(v: np.ndarray) -> np.ndarray:
        g = project_cone(v, cone)
        norm = float(np.sqrt(np.mean(g * g)))
        return g if norm <= delta else g * (delta / norm)

    best = 0.0
    for _ in range(starts):
        g = _feasible(delta * rng.standard_normal(grid_m))
        for _ in range(steps):
            nxt = _feasible(g + ascent)
            done = float(np.max(np.abs(nxt - g))) <= 1e-13 * max(delta, 1e-300)
            g = nxt
            if done:
                break
        best = max(best, sign * float(g[k]))
    return best


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def _growth_fit(deltas: Sequence[float], norms: Sequence[float]) -> Tuple[float, float, float]:
    d = np.asarray(deltas, dtype=float)
    v = np.asarray(norms, dtype=float)
    if d.size < 6 or d.size != v.size:
        raise ArgumentError(f"need at least 6 (delta, norm) pairs, got {d.size}")
    if np.any(d <= 0.0) or np.any(d >= 1.0) or d.max() / d.min() < 10.0:
        raise ArgumentError("deltas must lie in (0, 1) and span at least one decade")
    if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise FitError("envelope norms must be positive and finite")
    logv = np.log(v)
    if np.ptp(logv) <= 1e-12 * max(1.0, float(np.max(np.abs(logv)))):
        raise FitError("envelope norms are all equal; growth exponent undefined")
    design = np.column_stack([np.ones_like(d), np.log(d), np.log(np.log(1.0 / d))])
    fit = sm.OLS(logv, design).fit()
    return float(fit.params[1]), float(fit.params[2]), float(fit.rsquared)


def fit_growth_exponent(profile: EnvelopeProfile) -> Tuple[float, float, float]:
    """Fit log‖F_δ‖ = const + s·log δ + ν·log log(1/δ).

    Returns:
        (s_hat, nu_hat, r2)

    Raises:
        ArgumentError: fewer than 6 deltas or less than a decade of range
        FitError: nonpositive or degenerate (all-equal) norms
    """
    return _growth_fit(profile.deltas, profile.norms())


def _norm_triplet(values: np.ndarray) -> Tuple[float, float, float]:
    return (
        float(np.max(values)),
        float(np.sqrt(np.mean(values ** 2))),
        float(np.mean(values ** 3) ** (1.0 / 3.0)),
    )


def build_profile(
    shape_class: ShapeClass,
    center: Center,
    deltas: Optional[Iterable[float]] = None,
    grid_m: int = 256,
    method: str = "oracle",
    x_points: Optional[Iterable[float]] = None,
    fit_norm: str = "l2",
    design: Optional[Design] = None,
) -> EnvelopeProfile:
    """Envelope norms over a δ grid, with the growth fit when it is defined.

    Norms are taken over the m-point grid; with `x_points` all three norms
    are taken over those points instead (sup is then the meaningful one).
    """
    f0 = _center(center)
    deltas = sorted(float(d) for d in (DEFAULT_DELTAS if deltas is None else deltas))
    points = grid_points(grid_m) if x_points is None else np.asarray(list(x_points), dtype=float)
    if method not in ("analytic", "oracle"):
        raise ArgumentError(f"unknown envelope method {method!r}")

    if method == "oracle":
        oracle = _GridOracle(shape_class, f0, grid_m)

        def _value(delta: float, x: float) -> float:
            return max(oracle.pair(delta, x))
    else:

        def _value(delta: float, x: float) -> float:
            return envelope_analytic(shape_class, f0, delta, x, design)

    sup, l2, l3 = [], [], []
    for delta in deltas:
        values = np.array([_value(delta, float(x)) for x in points])
        a, b, c = _norm_triplet(values)
        sup.append(a)
        l2.append(b)
        l3.append(c)
        logger.debug("envelope %s/%s delta=%.4g sup=%.4g l2=%.4g", shape_class.label(), f0.name, delta, a, b)

    profile = EnvelopeProfile(
        shape=shape_class,
        center=f0.name,
        method=method,
        grid_m=grid_m,
        deltas=deltas,
        norm_sup=sup,
        norm_l2=l2,
        norm_l3=l3,
        fit_norm=fit_norm,
    )
    try:
        s_hat, nu_hat, r2 = fit_growth_exponent(profile)
    except (ArgumentError, FitError) as exc:
        logger.warning("no growth fit for %s around %s: %s", shape_class.label(), f0.name, exc)
        return profile
    return profile.model_copy(update={"s_hat": s_hat, "log_correction": nu_hat, "r2": r2})


def envelope_band(
    shape_class: ShapeClass,
    center: Center,
    deltas: Iterable[float],
    grid_m: int = 128,
    method: str = "oracle",
) -> pd.DataFrame:
    """Per-δ bands f0 − F⁻_δ ≤ f ≤ f0 + F⁺_δ on the grid.

    Columns: delta, x, center, lower, upper.
    """
    f0 = _center(center)
    t = grid_points(grid_m)
    f0v = f0(t)
    if method not in ("analytic", "oracle"):
        raise ArgumentError(f"unknown envelope method {method!r}")
    oracle = _GridOracle(shape_class, f0, grid_m) if method == "oracle" else None
    frames = []
    for delta in sorted(float(d) for d in deltas):
        if oracle is not None:
            up, down = np.array([oracle.pair(delta, float(x)) for x in t]).T
        else:
            up = np.array([envelope_analytic(shape_class, f0, delta, float(x)) for x in t])
            down = up
        frames.append(
            pd.DataFrame({"delta": delta, "x": t, "center": f0v, "lower": f0v - down, "upper": f0v + up})
        )
    return pd.concat(frames, ignore_index=True)
