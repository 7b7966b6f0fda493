"""
Projection kernels behind the shape-constrained least squares fits.

All kernels solve  min ½ Σ w_i (y_i − θ_i)²  over a polyhedral set and
work on distinct, sorted abscissae:

  - monotone cone: weighted PAVA (scipy.optimize.isotonic_regression)
  - convex cone: primal active set over hinge coefficients. A convex
    θ is a + b·x + Σ_j β_j (x − x_j)_+ with β_j ≥ 0; the active knots
    are added one at a time (Lawson–Hanson), each least squares step is
    a tridiagonal solve in the hat basis of the current knots.
  - Lipschitz band |θ_{i+1} − θ_i| ≤ L·h_i: bounded-variable least
    squares on the differences; fixed differences glue the sample into
    blocks whose offsets are weighted means.
  - general polyhedra Gθ ≤ h: least distance programming through NNLS,
    used for the all-pairs Hölder constraints (γ < 1) and small grids.
  - intersection with a box: Dykstra's alternating projections.

Every kernel returns (θ, iterations, kkt_residual, status); residuals are
divided by max(1, ‖y‖_∞) and weights are normalized to sum to one.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg, optimize

logger = logging.getLogger(__name__)

KernelResult = Tuple[np.ndarray, int, float, str]


def _normalized(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return w / w.sum()


def _scale(y: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(y), initial=0.0)))


# ---------------------------------------------------------------------------
# Monotone cone
# ---------------------------------------------------------------------------


def pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted projection onto nondecreasing vectors."""
    return optimize.isotonic_regression(np.asarray(y, dtype=float), weights=w, increasing=True).x


def isotonic_kkt(y: np.ndarray, w: np.ndarray, theta: np.ndarray) -> float:
    """Max violation of the isotonic optimality conditions.

    With R_i = Σ_{k≤i} w_k (y_k − θ_k): R_i ≥ 0, R_n = 0 and R_i = 0
    wherever θ_{i+1} > θ_i.
    """
    wn = _normalized(w)
    scale = _scale(y)
    cum = np.cumsum(wn * (y - theta))
    gaps = np.diff(theta)
    feas = np.max(-gaps, initial=0.0)
    dual = np.max(-cum[:-1], initial=0.0)
    comp = np.max(np.abs(cum[:-1][gaps > 1e-12 * scale]), initial=0.0)
    return float(max(feas, dual, comp, abs(cum[-1])) / scale)


# ---------------------------------------------------------------------------
# Convex cone
# ---------------------------------------------------------------------------


def _hat_fit(x: np.ndarray, y: np.ndarray, wn: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Weighted least squares over piecewise-linear functions with knots x[idx]."""
    kx = x[idx]
    k = idx.size
    seg = np.clip(np.searchsorted(kx, x, side="right") - 1, 0, k - 2)
    tau = (x - kx[seg]) / (kx[seg + 1] - kx[seg])
    a, b = 1.0 - tau, tau
    diag = np.bincount(seg, wn * a * a, minlength=k) + np.bincount(seg + 1, wn * b * b, minlength=k)
    off = np.bincount(seg, wn * a * b, minlength=k - 1)[: k - 1]
    rhs = np.bincount(seg, wn * a * y, minlength=k) + np.bincount(seg + 1, wn * b * y, minlength=k)
    bands = np.zeros((2, k))
    bands[0, 1:] = off
    bands[1, :] = diag
    v = linalg.solveh_banded(bands, rhs)
    return a * v[seg] + b * v[seg + 1]


def _hinge_coefficients(x: np.ndarray, idx: np.ndarray, theta: np.ndarray) -> np.ndarray:
    slopes = np.diff(theta[idx]) / np.diff(x[idx])
    return np.diff(slopes)


def _hinge_gradient(x: np.ndarray, wn: np.ndarray, r: np.ndarray) -> np.ndarray:
    """g_j = Σ_{i>j} w_i r_i (x_i − x_j): descent rate of adding a hinge at x_j."""
    wr = wn * r
    tail = np.cumsum(wr[::-1])[::-1]
    tail_x = np.cumsum((wr * x)[::-1])[::-1]
    return tail_x - x * tail


def convex_kkt(x: np.ndarray, y: np.ndarray, w: np.ndarray, theta: np.ndarray) -> float:
    """Max violation of the convex-cone optimality conditions."""
    wn = _normalized(w)
    scale = _scale(y)
    r = y - theta
    g = _hinge_gradient(x, wn, r)[1:-1]
    slopes = np.diff(theta) / np.diff(x)
    beta = np.diff(slopes)
    kinks = beta > 1e-10 * scale / max(float(np.min(np.diff(x))), 1e-300)
    dual = np.max(g, initial=0.0)
    comp = np.max(np.abs(g[kinks]), initial=0.0)
    feas = np.max(-beta, initial=0.0) * float(np.min(np.diff(x)))
    ortho = max(abs(np.sum(wn * r)), abs(np.sum(wn * r * x)))
    return float(max(dual, comp, feas, ortho) / scale)


def convex_projection(
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> KernelResult:
    """Weighted projection onto the convex cone by hinge active set."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n <= 2:
        return y.copy(), 0, 0.0, "converged"
    wn = _normalized(w)
    scale = _scale(y)
    add_tol = 0.5 * tol * scale

    active = np.zeros(n, dtype=bool)
    active[[0, n - 1]] = True
    theta = _hat_fit(x, y, wn, np.flatnonzero(active))
    excluded = np.zeros(n, dtype=bool)
    iterations = 0
    status = "max-iter"

    while iterations < max_iter:
        g = _hinge_gradient(x, wn, y - theta)
        g[active | excluded] = -np.inf
        j = int(np.argmax(g))
        if not g[j] > add_tol:
            status = "converged"
            break
        active[j] = True
        moved = False
        fresh = True
        while iterations < max_iter:
            iterations += 1
            idx = np.flatnonzero(active)
            trial = _hat_fit(x, y, wn, idx)
            beta_new = _hinge_coefficients(x, idx, trial)
            beta_cur = _hinge_coefficients(x, idx, theta)
            pos = int(np.searchsorted(idx, j)) - 1
            if fresh:
                # theta has no kink at the new knot yet
                beta_cur[pos] = 0.0
                if beta_new[pos] <= 0.0:
                    active[j] = False
                    excluded[j] = True
                    break
                fresh = False
            if np.all(beta_new > 0.0):
                theta, moved = trial, True
                break
            neg = beta_new <= 0.0
            ratios = np.full(beta_new.shape, np.inf)
            ratios[neg] = beta_cur[neg] / (beta_cur[neg] - beta_new[neg])
            step = float(np.clip(ratios.min(), 0.0, 1.0))
            blocking = idx[1:-1][ratios <= step * (1.0 + 1e-12) + 1e-300]
            theta = theta + step * (trial - theta)
            active[blocking] = False
            moved = moved or step > 1e-14
        if moved:
            excluded[:] = False

    kkt = convex_kkt(x, y, w, theta)
    if kkt > tol:
        status = "max-iter"
    logger.debug("convex projection: n=%d iterations=%d kkt=%.3g", n, iterations, kkt)
    return theta, iterations, kkt, status


# ---------------------------------------------------------------------------
# Lipschitz band (adjacent differences)
# ---------------------------------------------------------------------------


def _block_solution(y: np.ndarray, wn: np.ndarray, caps: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Least squares θ when differences with state ±1 sit at ±caps and the rest are free."""
    fixed = np.where(state != 0, state * caps, 0.0)
    block = np.concatenate(([0], np.cumsum(state == 0)))
    profile = np.concatenate(([0.0], np.cumsum(fixed)))
    starts = np.concatenate(([0], np.flatnonzero(state == 0) + 1))
    profile = profile - profile[starts][block]
    offsets = np.bincount(block, wn * (y - profile)) / np.bincount(block, wn)
    return offsets[block] + profile


def lipschitz_kkt(x: np.ndarray, y: np.ndarray, w: np.ndarray, theta: np.ndarray, lip: float) -> float:
    wn = _normalized(w)
    scale = _scale(y)
    caps = lip * np.diff(x)
    d = np.diff(theta)
    cum = np.cumsum(wn * (y - theta))
    tail = cum[-1] - cum[:-1]  # Σ_{i>j} w_i r_i
    slack = 1e-9 * np.maximum(caps, 1e-300)
    at_upper = d >= caps - slack
    at_lower = d <= -caps + slack
    viol = np.where(at_upper, -tail, np.where(at_lower, tail, np.abs(tail)))
    feas = np.max(np.abs(d) - caps, initial=0.0)
    return float(max(np.max(viol, initial=0.0), feas, abs(cum[-1])) / scale)


def lipschitz_projection(
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    lip: float,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> KernelResult:
    """Weighted projection onto {θ : |θ_{i+1} − θ_i| ≤ lip·(x_{i+1} − x_i)}."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n == 1:
        return y.copy(), 0, 0.0, "converged"
    wn = _normalized(w)
    scale = _scale(y)
    add_tol = 0.5 * tol * scale
    caps = lip * np.diff(x)

    state = np.where(np.diff(y) >= 0.0, 1, -1).astype(np.int8)
    theta = _block_solution(y, wn, caps, state)
    excluded = np.zeros(n - 1, dtype=bool)
    iterations = 0
    status = "max-iter"

    while iterations < max_iter:
        cum = np.cumsum(wn * (y - theta))
        tail = cum[-1] - cum[:-1]
        viol = np.where(state == 1, -tail, np.where(state == -1, tail, -np.inf))
        viol[excluded] = -np.inf
        j = int(np.argmax(viol))
        if not viol[j] > add_tol:
            status = "converged"
            break
        previous = state[j]
        state[j] = 0
        moved = False
        while iterations < max_iter:
            iterations += 1
            trial = _block_solution(y, wn, caps, state)
            d_new = np.diff(trial)
            free = state == 0
            over = free & (np.abs(d_new) > caps * (1.0 + 1e-12))
            if not np.any(over):
                theta, moved = trial, True
                break
            d_cur = np.diff(theta)
            bound = np.sign(d_new) * caps
            ratios = np.full(d_new.shape, np.inf)
            ratios[over] = (bound[over] - d_cur[over]) / (d_new[over] - d_cur[over])
            step = float(np.clip(ratios.min(), 0.0, 1.0))
            blocking = np.flatnonzero(ratios <= step * (1.0 + 1e-12) + 1e-300)
            if step <= 1e-14 and np.array_equal(blocking, [j]):
                state[j] = previous
                excluded[j] = True
                break
            theta = theta + step * (trial - theta)
            state[blocking] = np.sign(d_new[blocking]).astype(np.int8)
            moved = moved or step > 1e-14
        if moved:
            excluded[:] = False

    kkt = lipschitz_kkt(x, y, w, theta, lip)
    if kkt > tol:
        status = "max-iter"
    logger.debug("lipschitz projection: n=%d iterations=%d kkt=%.3g", n, iterations, kkt)
    return theta, iterations, kkt, status


# ---------------------------------------------------------------------------
# General polyhedra: least distance programming
# ---------------------------------------------------------------------------


def ldp_projection(
    y: np.ndarray,
    w: np.ndarray,
    G: np.ndarray,
    h: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, str]:
    """min ½ Σ w (θ − y)² subject to Gθ ≤ h.

    With u = sqrt(w)(θ − y) this is min ‖u‖ s.t. Eu ≥ f, E = −G/sqrt(w),
    f = Gy − h, solved by NNLS on [Eᵀ; fᵀ] z ≈ e_{n+1}.

    Returns:
        (θ, multipliers of the rows of G, status)
    """
    y = np.asarray(y, dtype=float)
    sw = np.sqrt(np.asarray(w, dtype=float))
    G = np.atleast_2d(np.asarray(G, dtype=float))
    f = G @ y - h
    if np.all(f <= 0.0):
        return y.copy(), np.zeros(G.shape[0]), "converged"
    E = -G / sw[None, :]
    A = np.vstack([E.T, f[None, :]])
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    try:
        z, _ = optimize.nnls(A, b, maxiter=max(50 * A.shape[1], 1000))
    except RuntimeError:
        logger.warning("NNLS hit its iteration cap (%d constraints)", G.shape[0])
        return y.copy(), np.zeros(G.shape[0]), "max-iter"
    r = A @ z - b
    denom = -r[-1]
    if denom <= 1e-14:
        return y.copy(), np.zeros(G.shape[0]), "infeasible"
    u = r[:-1] / denom
    return y + u / sw, z / denom, "converged"


def holder_pairs_projection(
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    gamma: float,
    lip: float,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> KernelResult:
    """Projection onto {|θ_i − θ_j| ≤ lip·|x_i − x_j|^γ for all pairs}.

    Cutting planes: start from adjacent pairs, re-solve the LDP after
    adding the most violated pairs, stop once every pair is feasible.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n == 1:
        return y.copy(), 0, 0.0, "converged"
    scale = _scale(y)
    iu, ju = np.triu_indices(n, k=1)
    bounds = lip * (x[ju] - x[iu]) ** gamma
    batch = max(10, n)

    rows = {(i, i + 1, s) for i in range(n - 1) for s in (1, -1)}
    theta = y.copy()
    multipliers = np.zeros(0)
    status = "max-iter"
    iterations = 0
    G = np.zeros((0, n))
    h = np.zeros(0)
    while iterations < max_iter:
        iterations += 1
        ordered = sorted(rows)
        G = np.zeros((len(ordered), n))
        h = np.empty(len(ordered))
        for k, (i, j, s) in enumerate(ordered):
            G[k, i], G[k, j] = s, -s
            h[k] = lip * (x[j] - x[i]) ** gamma
        theta, multipliers, status = ldp_projection(y, _normalized(w), G, h)
        if status != "converged":
            break
        excess = np.abs(theta[iu] - theta[ju]) - bounds
        worst = np.argsort(excess)[::-1][:batch]
        worst = worst[excess[worst] > 0.1 * tol * scale]
        if worst.size == 0:
            break
        before = len(rows)
        rows.update(
            (int(iu[k]), int(ju[k]), 1 if theta[iu[k]] > theta[ju[k]] else -1) for k in worst
        )
        if len(rows) == before:
            break

    excess = np.abs(theta[iu] - theta[ju]) - bounds
    feas = float(np.max(excess, initial=0.0))
    slack = np.abs(G @ theta - h) if G.size else np.zeros(0)
    comp = float(np.max(multipliers * slack, initial=0.0)) if multipliers.size else 0.0
    kkt = max(feas, comp) / scale
    if status == "converged" and kkt > tol:
        status = "max-iter"
    return theta, iterations, kkt, status


# ---------------------------------------------------------------------------
# Box intersection
# ---------------------------------------------------------------------------


def dykstra(
    v: np.ndarray,
    project_a: Callable[[np.ndarray], np.ndarray],
    project_b: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-9,
    max_iter: int = 20_000,
    certify: bool = False,
) -> KernelResult:
    """Projection onto A ∩ B from the projections onto A and B.

    The returned point lies in B exactly and in A up to the fixed-point
    residual. The iterates keep v − x = p + q with P_B(x + q) = x, so x is
    the projection once P_A(x + p) = x as well; `certify` adds the gap
    ‖P_A(x + p) − x‖_∞ to the residual at the cost of one more call to
    `project_a`.
    """
    x = np.asarray(v, dtype=float).copy()
    scale = _scale(x)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    residual = np.inf
    status = "max-iter"
    iterations = max_iter
    for it in range(1, max_iter + 1):
        a = project_a(x + p)
        p = x + p - a
        b = project_b(a + q)
        q = a + q - b
        residual = max(float(np.max(np.abs(b - x))), float(np.max(np.abs(a - b)))) / scale
        x = b
        if residual <= tol:
            status, iterations = "converged", it
            break
    else:
        logger.warning("Dykstra stopped after %d iterations (residual %.3g)", max_iter, residual)
    if certify:
        gap = float(np.max(np.abs(project_a(x + p) - x), initial=0.0)) / scale
        residual = max(residual, gap)
    return x, iterations, residual, status


def box(phi: float, lower: Optional[np.ndarray] = None, upper: Optional[np.ndarray] = None):
    """Projection onto [lower, upper] (default [−phi, phi])."""
    lo = -phi if lower is None else lower
    hi = phi if upper is None else upper

    def _clip(v: np.ndarray) -> np.ndarray:
        return np.clip(v, lo, hi)

    return _clip
