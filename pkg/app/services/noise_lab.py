"""
Heavy-tailed, heteroscedastic error generators.

Every law is symmetric: a magnitude |Z| is drawn and multiplied by an
independent Rademacher sign, so E[ε | X] = 0 by construction. Laws
with a finite variance are standardized to unit variance before the
conditional scale σ(x) is applied; two_moment_log is used unscaled.

    gaussian        N(0, 1)
    student_t(df)   t_df / sqrt(df/(df−2)); unstandardized when df ≤ 2
    sym_pareto(q)   |Z| ~ Pareto(min 1, index q), scaled by sqrt((q−2)/q)
    two_moment_log  P(|Z| ≥ t) = log²2 / (t² log²(1+t)) for t ≥ 1
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

import numpy as np
import statsmodels.api as sm
from scipy import integrate, special

from app.core.errors import ArgumentError, ConfigurationError
from app.schemas.noise import NoiseMetadata, NoiseSpec, SigmaSpec

logger = logging.getLogger(__name__)

LOG2_SQ = math.log(2.0) ** 2
TWO_MOMENT_T_MAX = 1e18
_INVERSION_STEPS = 80


# ---------------------------------------------------------------------------
# Conditional scale
# ---------------------------------------------------------------------------


def sigma_values(sigma_fn: SigmaSpec, x: np.ndarray) -> np.ndarray:
    """σ(x) for the built-in scale functions."""
    x = np.asarray(x, dtype=float)
    if sigma_fn.kind == "constant":
        return np.full_like(x, sigma_fn.sigma)
    if sigma_fn.name == "linear":
        return sigma_fn.sigma * (0.2 + 0.8 * x)
    return sigma_fn.sigma * (0.2 + 0.8 * np.sin(2.0 * np.pi * x) ** 2)


# ---------------------------------------------------------------------------
# Law metadata
# ---------------------------------------------------------------------------


def _standardization(spec: NoiseSpec) -> float:
    if spec.law == "student_t" and spec.df > 2:
        return math.sqrt((spec.df - 2.0) / spec.df)
    if spec.law == "sym_pareto":
        return math.sqrt((spec.q_index - 2.0) / spec.q_index)
    return 1.0


def _validate(spec: NoiseSpec) -> bool:
    """Return whether (CVar) holds; raise on unusable specs."""
    if spec.law == "sym_pareto" and spec.q_index <= 2:
        raise ConfigurationError(
            f"sym_pareto needs q_index > 2 for a finite variance, got {spec.q_index:g}"
        )
    if spec.law == "student_t" and spec.df <= 2:
        if spec.sigma_fn.kind != "constant":
            raise ConfigurationError(
                "student_t with df <= 2 has no variance; only a constant sigma_fn is allowed"
            )
        return False
    return True


def describe_noise(spec: NoiseSpec) -> NoiseMetadata:
    """Validate a spec and report what it guarantees.

    Raises:
        ConfigurationError: sym_pareto with q ≤ 2, or student_t with
            df ≤ 2 combined with an x-dependent scale
    """
    cvar_ok = _validate(spec)
    if not cvar_ok:
        logger.warning("student_t(df=%g) violates the conditional variance bound", spec.df)

    if spec.law == "gaussian":
        moment_index = None
    elif spec.law == "student_t":
        moment_index = float(spec.df)
    elif spec.law == "sym_pareto":
        moment_index = float(spec.q_index)
    else:
        moment_index = 2.0

    return NoiseMetadata(
        law=spec.label(),
        sup_sigma=float(spec.sigma_fn.sigma),
        moment_index=moment_index,
        cvar_ok=cvar_ok,
        standardization=_standardization(spec),
    )


def survival_two_moment_log(t) -> np.ndarray:
    """P(|Z| ≥ t) of the two-moment law; equal to 1 for t ≤ 1."""
    t = np.asarray(t, dtype=float)
    safe = np.maximum(t, 1.0)
    return np.where(t <= 1.0, 1.0, LOG2_SQ / (safe * safe * np.log1p(safe) ** 2))


def law_moment(spec: NoiseSpec, r: float) -> float:
    """E|Z|^r of the (standardized) law, before σ(x) scaling.

    Returns math.inf when the r-th moment does not exist.
    """
    if r < 0:
        raise ArgumentError("moment order must be nonnegative")
    if spec.law == "gaussian":
        return 2.0 ** (r / 2.0) * special.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)
    if spec.law == "student_t":
        nu = spec.df
        if r >= nu:
            return math.inf
        raw = (
            nu ** (r / 2.0)
            * special.gamma((r + 1.0) / 2.0)
            * special.gamma((nu - r) / 2.0)
            / (math.sqrt(math.pi) * special.gamma(nu / 2.0))
        )
        return raw * _standardization(spec) ** r
    if spec.law == "sym_pareto":
        q = spec.q_index
        if r >= q:
            return math.inf
        return _standardization(spec) ** r * q / (q - r)
    if r > 2:
        return math.inf
    # E|Z|^r = 1 + r ∫_1^∞ t^{r−1} S(t) dt
    tail, _ = integrate.quad(
        lambda t: r * t ** (r - 1.0) * float(survival_two_moment_log(t)), 1.0, np.inf, limit=400
    )
    return 1.0 + tail


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _two_moment_magnitudes(u: np.ndarray) -> np.ndarray:
    """Invert the survival function by bisection in log t over [1, 10^18]."""
    lo = np.zeros_like(u)
    hi = np.full_like(u, math.log(TWO_MOMENT_T_MAX))
    for _ in range(_INVERSION_STEPS):
        mid = 0.5 * (lo + hi)
        above = survival_two_moment_log(np.exp(mid)) > u
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.exp(0.5 * (lo + hi))


def _magnitudes(spec: NoiseSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    if spec.law == "gaussian":
        return np.abs(rng.standard_normal(size))
    if spec.law == "student_t":
        return np.abs(rng.standard_t(spec.df, size)) * _standardization(spec)
    u = 1.0 - rng.random(size)  # in (0, 1]
    if spec.law == "sym_pareto":
        return u ** (-1.0 / spec.q_index) * _standardization(spec)
    return _two_moment_magnitudes(u)


def draw_errors(
    spec: NoiseSpec,
    x,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """ε_i = σ(x_i)·Z_i with Z_i i.i.d. from the law of `spec`.

    Args:
        spec: Noise specification
        x: Abscissae in [0,1]
        rng: Generator of the replication; defaults to one seeded by spec.seed

    Raises:
        ConfigurationError: see describe_noise
        ArgumentError: if some abscissa lies outside [0,1]
    """
    _validate(spec)
    x = np.asarray(x, dtype=float)
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ArgumentError("abscissae must lie in [0,1]")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    z = _magnitudes(spec, x.size, rng)
    signs = rng.integers(0, 2, size=x.size) * 2.0 - 1.0
    return sigma_values(spec.sigma_fn, x) * signs * z


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def empirical_moment(errors, q: float) -> float:
    """mean |ε_i|^q."""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ArgumentError("empirical moment of an empty vector")
    if q < 1:
        raise ArgumentError("moment order must be at least 1")
    return float(np.mean(np.abs(errors) ** q))


def survival_slope(values, top_fraction: float = 0.1) -> Optional[float]:
    """Log-log slope of the empirical survival over the top order statistics.

    Uses the points (log v_(i), log P̂(V ≥ v_(i))) of the largest
    top_fraction of the positive values; returns None with fewer than
    three distinct points.
    """
    v = np.sort(np.asarray(values, dtype=float))
    v = v[v > 0]
    total = np.asarray(values).size
    k = int(math.floor(top_fraction * total))
    if k < 3 or v.size < k:
        return None
    top = v[-k:]
    # P̂(V ≥ v_(i)) for the i-th largest is i / total
    surv = np.arange(k, 0, -1) / total
    if np.unique(top).size < 3:
        return None
    fit = sm.OLS(np.log(surv), sm.add_constant(np.log(top))).fit()
    return float(fit.params[1])


def binned_second_moment(x, errors, bins: int = 10) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conditional E[ε² | X in bin] with its Monte Carlo standard error.

    Returns:
        (bin_centers, second_moments, standard_errors); empty bins give nan
    """
    x = np.asarray(x, dtype=float)
    sq = np.asarray(errors, dtype=float) ** 2
    edges = np.linspace(0.0, 1.0, bins + 1)
    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins).astype(float)
    sums = np.bincount(idx, weights=sq, minlength=bins)
    sums2 = np.bincount(idx, weights=sq * sq, minlength=bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = sums / counts
        var = sums2 / counts - mean ** 2
        se = np.sqrt(np.maximum(var, 0.0) / counts)
    return 0.5 * (edges[:-1] + edges[1:]), mean, se

