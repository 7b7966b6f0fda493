"""
Least squares estimators over shape-constrained classes.

Tied abscissae are merged first (weight = multiplicity, response = mean),
which leaves the least squares objective unchanged up to a constant.
With a sup-norm bound Φ the cone projection is intersected with the box
[−Φ, Φ] by Dykstra's algorithm; clipping a cone fit is not a projection
and is never used.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import ArgumentError
from app.models import ConeConstraint, FittedFn, Sample
from app.schemas.shape import ShapeClass, SolveReport
from app.services import projections

logger = logging.getLogger(__name__)

Fit = Tuple[FittedFn, SolveReport]


def _objective(sample: Sample, fitted: FittedFn) -> float:
    resid = sample.y - fitted(sample.x)
    return float(0.5 * np.sum(resid * resid))


def _report(sample: Sample, fitted: FittedFn, iterations: int, kkt: float, status: str) -> SolveReport:
    return SolveReport(
        objective=_objective(sample, fitted),
        kkt_residual=float(kkt),
        iterations=int(iterations),
        status=status,
    )


_SEVERITY = {"converged": 0, "max-iter": 1, "infeasible": 2}


class _KernelTrace:
    """A kernel seen by Dykstra as a plain projection.

    Keeps the worst status and the total iterations of every inner solve,
    so an inner kernel that stops at its cap is never reported converged.
    """

    def __init__(self, kernel: Callable[[np.ndarray], projections.KernelResult]):
        self.kernel = kernel
        self.iterations = 0
        self.status = "converged"

    def __call__(self, v: np.ndarray) -> np.ndarray:
        theta, iterations, _, status = self.kernel(v)
        self.iterations += iterations
        if _SEVERITY[status] > _SEVERITY[self.status]:
            self.status = status
        return theta


def _with_box(
    y: np.ndarray,
    kernel: Callable[[np.ndarray], projections.KernelResult],
    bound: float,
) -> projections.KernelResult:
    trace = _KernelTrace(kernel)
    theta, _, kkt, status = projections.dykstra(
        y,
        trace,
        projections.box(bound),
        tol=settings.DYKSTRA_TOLERANCE,
        max_iter=settings.DYKSTRA_MAX_ITER,
        certify=True,
    )
    if _SEVERITY[trace.status] > _SEVERITY[status]:
        logger.warning("inner projection inside the box ended %s", trace.status)
        status = trace.status
    return theta, trace.iterations, kkt, status


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def fit_isotonic(sample: Sample, bound: Optional[float] = None) -> Fit:
    """Isotonic least squares; piecewise-constant left-continuous extension."""
    knots, y, w = sample.merged()
    if bound is None:
        theta = projections.pava(y, w)
        iterations, kkt = 1, projections.isotonic_kkt(y, w, theta)
        status = "converged" if kkt <= settings.SOLVER_TOLERANCE else "max-iter"
    else:
        theta, iterations, kkt, status = _with_box(
            y, lambda v: (projections.pava(v, w), 1, 0.0, "converged"), bound
        )
    fitted = FittedFn(knots, theta, "piecewise-constant-left")
    return fitted, _report(sample, fitted, iterations, kkt, status)


def fit_convex(sample: Sample, bound: Optional[float] = None) -> Fit:
    """Convex least squares; left-continuous piecewise-linear extension.

    Raises:
        ArgumentError: fewer than three distinct abscissae
    """
    knots, y, w = sample.merged()
    if knots.size < 3:
        raise ArgumentError("convex least squares needs at least three distinct abscissae")

    def _project(v: np.ndarray) -> projections.KernelResult:
        return projections.convex_projection(
            knots, v, w, tol=settings.SOLVER_TOLERANCE, max_iter=settings.SOLVER_MAX_ITER
        )

    if bound is None:
        theta, iterations, kkt, status = _project(y)
    else:
        theta, iterations, kkt, status = _with_box(y, _project, bound)
    fitted = FittedFn(knots, theta, "piecewise-linear-left-continuous")
    return fitted, _report(sample, fitted, iterations, kkt, status)


def fit_holder(sample: Sample, gamma: float, lip: float, bound: Optional[float] = None) -> Fit:
    """Hölder-constrained least squares; piecewise-linear extension.

    γ = 1 only needs adjacent constraints; γ < 1 enforces all pairs and is
    limited to settings.HOLDER_MAX_N distinct abscissae.

    Raises:
        ArgumentError: γ outside (0,1], L ≤ 0, or too many points for γ < 1
    """
    if not 0.0 < gamma <= 1.0 or lip <= 0.0:
        raise ArgumentError(f"need 0 < gamma <= 1 and lip > 0, got gamma={gamma}, lip={lip}")
    knots, y, w = sample.merged()
    if gamma < 1.0 and knots.size > settings.HOLDER_MAX_N:
        raise ArgumentError(
            f"all-pairs Hölder fit is capped at {settings.HOLDER_MAX_N} points, got {knots.size}"
        )

    def _project_full(v: np.ndarray) -> projections.KernelResult:
        if gamma == 1.0:
            return projections.lipschitz_projection(
                knots, v, w, lip, tol=settings.SOLVER_TOLERANCE, max_iter=settings.SOLVER_MAX_ITER
            )
        return projections.holder_pairs_projection(
            knots, v, w, gamma, lip, tol=settings.SOLVER_TOLERANCE, max_iter=settings.SOLVER_MAX_ITER
        )

    if bound is None:
        theta, iterations, kkt, status = _project_full(y)
    else:
        theta, iterations, kkt, status = _with_box(y, _project_full, bound)
    fitted = FittedFn(knots, theta, "piecewise-linear-left-continuous")
    return fitted, _report(sample, fitted, iterations, kkt, status)


def fit_shape(sample: Sample, shape_class: ShapeClass, bound: Optional[float] = None) -> Fit:
    """Dispatch on the class kind; `bound` defaults to the class's Φ."""
    bound = shape_class.phi if bound is None else bound
    if shape_class.kind == "monotone":
        return fit_isotonic(sample, bound)
    if shape_class.kind == "convex":
        return fit_convex(sample, bound)
    return fit_holder(sample, shape_class.gamma, shape_class.lip, bound)


# ---------------------------------------------------------------------------
# Cone projections
# ---------------------------------------------------------------------------


def project_cone(v, cone: ConeConstraint, weights=None) -> np.ndarray:
    """Weighted Euclidean projection Π_K(v) onto a shape cone.

    Raises:
        ArgumentError: if the dimensions of v, the cone and the weights differ
    """
    v = np.asarray(v, dtype=float)
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
    if v.shape != (cone.dim,) or w.shape != v.shape:
        raise ArgumentError(f"dimension mismatch: v {v.shape}, cone {cone.dim}, weights {w.shape}")
    if np.any(w <= 0.0):
        raise ArgumentError("projection weights must be positive")
    if cone.kind == "monotone":
        return projections.pava(v, w)
    return projections.convex_projection(
        cone.abscissae, v, w, tol=settings.SOLVER_TOLERANCE, max_iter=settings.SOLVER_MAX_ITER
    )[0]


def box_project(v, cone: ConeConstraint, weights, phi: float, lower=None, upper=None) -> projections.KernelResult:
    """Weighted projection onto cone ∩ box; the box defaults to [−phi, phi]."""
    w = np.asarray(weights, dtype=float)
    return projections.dykstra(
        np.asarray(v, dtype=float),
        lambda u: project_cone(u, cone, w),
        projections.box(phi, lower, upper),
        tol=settings.DYKSTRA_TOLERANCE,
        max_iter=settings.DYKSTRA_MAX_ITER,
    )
