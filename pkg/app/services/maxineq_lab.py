"""
Finite-maximum inequality for sums of independent mean-zero vectors.

For X_i ∈ R^p with ξ_i = max_j |X_ij| and V = max_j Σ_i E X_ij²,

    E max_j |Σ_i X_ij| ≤ √(6V log(1+p)) + √2 (3 log(1+p))^{1−1/q} (2 Σ_i E ξ_i^q)^{1/q}.

verify_b1 computes V and Σ E ξ^q analytically for the built-in column
laws and compares the bound against a Monte Carlo estimate of the left
side; a negative slack is an implementation bug and raises.
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np
import statsmodels.api as sm
from scipy import integrate, special

from app.core.errors import ArgumentError, InvariantViolation
from app.schemas.maxineq import ColumnFamily, GrowthReport, MaxIneqConfig, MaxIneqResult
from app.schemas.noise import NoiseSpec
from app.services.noise_lab import draw_errors, law_moment

logger = logging.getLogger(__name__)

MIN_REPS = 1000
_CHUNK_ENTRIES = 4_000_000


def bound_b1(V: float, logp1: float, q: float, sum_xi_q: float) -> float:
    """√(6V·log(1+p)) + √2·(3 log(1+p))^{1−1/q}·(2 Σ E ξ^q)^{1/q}."""
    if V < 0.0 or logp1 < 0.0 or sum_xi_q < 0.0:
        raise ArgumentError("V, log(1+p) and sum E[xi^q] must be nonnegative")
    if q < 2.0:
        raise ArgumentError(f"need q >= 2, got {q}")
    return math.sqrt(6.0 * V * logp1) + math.sqrt(2.0) * (3.0 * logp1) ** (1.0 - 1.0 / q) * (
        2.0 * sum_xi_q
    ) ** (1.0 / q)


def alternative_bound(V: float, logp1: float, mean_max_xi_sq: float) -> float:
    """√(V log(1+p)) + log(1+p)·√(E max_i ξ_i²), constants dropped."""
    return math.sqrt(V * logp1) + logp1 * math.sqrt(mean_max_xi_sq)


# ---------------------------------------------------------------------------
# Column laws
# ---------------------------------------------------------------------------


def _noise(family: ColumnFamily) -> Optional[NoiseSpec]:
    if family.law == "gaussian":
        return NoiseSpec(law="gaussian")
    if family.law == "sym_pareto":
        return NoiseSpec(law="sym_pareto", q_index=family.q_index)
    return None


def _abs_cdf(family: ColumnFamily, t: float) -> float:
    """P(|scale·Z| ≤ t) for a unit-variance law."""
    u = t / family.scale
    if family.law == "gaussian":
        return float(special.erf(u / math.sqrt(2.0)))
    if family.law == "rademacher":
        return 1.0 if u >= 1.0 else 0.0
    a = family.q_index
    x = u * math.sqrt(a / (a - 2.0))
    return 0.0 if x < 1.0 else 1.0 - x ** (-a)


def _breakpoints(families: Sequence[ColumnFamily]) -> list:
    points = set()
    for fam in families:
        if fam.law == "rademacher":
            points.add(fam.scale)
        elif fam.law == "sym_pareto":
            points.add(fam.scale * math.sqrt((fam.q_index - 2.0) / fam.q_index))
    return sorted(points)


def row_max_moment(families: Sequence[ColumnFamily], q: float) -> float:
    """E ξ^q for ξ = max over the columns of one row, by quadrature of q t^{q−1} P(ξ > t)."""

    def _tail(t: float) -> float:
        below = 1.0
        for fam in families:
            below *= _abs_cdf(fam, t) ** fam.count
        return q * t ** (q - 1.0) * (1.0 - below)

    edges = [0.0] + _breakpoints(families)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(_tail, lo, hi, limit=200)[0]
    total += integrate.quad(_tail, edges[-1], np.inf, limit=400)[0]
    return total


def column_variance(family: ColumnFamily) -> float:
    spec = _noise(family)
    second = 1.0 if spec is None else law_moment(spec, 2.0)
    return family.scale ** 2 * second


def _draw(family: ColumnFamily, size: tuple, rng: np.random.Generator) -> np.ndarray:
    spec = _noise(family)
    count = int(np.prod(size))
    if spec is None:
        z = rng.integers(0, 2, size=count) * 2.0 - 1.0
    else:
        z = draw_errors(spec, np.zeros(count), rng)
    return family.scale * z.reshape(size)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def verify_b1(config: MaxIneqConfig, reps: int = 10_000) -> MaxIneqResult:
    """Monte Carlo check of the finite-maximum bound.

    Raises:
        ArgumentError: reps < 1000
        InvariantViolation: the Monte Carlo estimate exceeds the bound
    """
    if reps < MIN_REPS:
        raise ArgumentError(f"verify_b1 needs reps >= {MIN_REPS}, got {reps}")
    rng = np.random.default_rng(config.seed)
    n, p, q = config.n, config.p, config.q
    V = n * max(column_variance(fam) for fam in config.families)
    sum_xi_q = n * row_max_moment(config.families, q)
    logp1 = math.log1p(p)
    bound = bound_b1(V, logp1, q, sum_xi_q)

    chunk = max(1, _CHUNK_ENTRIES // (n * p))
    maxima, max_sq = [], []
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        X = np.concatenate([_draw(fam, (m, n, fam.count), rng) for fam in config.families], axis=2)
        maxima.append(np.max(np.abs(X.sum(axis=1)), axis=1))
        max_sq.append(np.max(X * X, axis=(1, 2)))
        done += m
    maxima = np.concatenate(maxima)
    estimate = float(maxima.mean())
    mc_se = float(maxima.std(ddof=1) / math.sqrt(reps))
    slack = bound - estimate
    logger.info("finite-max bound n=%d p=%d q=%g: estimate %.4g, bound %.4g", n, p, q, estimate, bound)
    if slack < 0.0:
        raise InvariantViolation(
            f"finite-maximum bound violated: estimate {estimate:.6g} > bound {bound:.6g} (n={n}, p={p}, q={q})"
        )
    return MaxIneqResult(
        config=config,
        reps=reps,
        V=V,
        sum_xi_q=sum_xi_q,
        mc_estimate=estimate,
        mc_se=mc_se,
        bound=bound,
        slack=slack,
        alternative_bound=alternative_bound(V, logp1, float(np.concatenate(max_sq).mean())),
    )


def random_configs(count: int, seed: int = 0, max_n: int = 200, max_p: int = 64) -> list:
    """Seeded mix of gaussian and sym_pareto(2.5) configurations with q = 2."""
    rng = np.random.default_rng(seed)
    configs = []
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(1, max_p + 1))
        heavy = int(rng.integers(0, p + 1))
        families = []
        if heavy:
            families.append(ColumnFamily(law="sym_pareto", q_index=2.5, scale=float(rng.uniform(0.5, 2.0)), count=heavy))
        if p - heavy:
            families.append(ColumnFamily(law="gaussian", scale=float(rng.uniform(0.5, 2.0)), count=p - heavy))
        configs.append(MaxIneqConfig(n=n, p=p, q=2.0, families=families, seed=int(rng.integers(0, 2**32)) + i))
    return configs


def finite_max_growth(
    N_values: Optional[Sequence[int]] = None,
    n: int = 200,
    reps: int = 2000,
    seed: int = 0,
) -> GrowthReport:
    """E max_{j≤N} |G_n(ε f_j)| for f_j(x) = cos(2πjx), regressed on √(log N).

    X uniform on [0,1] and ε standard gaussian.
    """
    N_values = sorted(int(N) for N in (N_values or [2 ** k for k in range(2, 11)]))
    if N_values[0] < 2 or n < 1 or reps < 2:
        raise ArgumentError("need N >= 2, n >= 1 and reps >= 2")
    rng = np.random.default_rng(seed)
    top = N_values[-1]
    freqs = 2.0 * np.pi * np.arange(1, top + 1)
    idx = np.array(N_values) - 1
    totals = np.zeros(len(N_values))
    for _ in range(reps):
        x = rng.uniform(size=n)
        eps = rng.standard_normal(n)
        stats = np.abs(eps @ np.cos(np.outer(x, freqs))) / math.sqrt(n)
        totals += np.maximum.accumulate(stats)[idx]
    means = totals / reps
    fit = sm.OLS(means, sm.add_constant(np.sqrt(np.log(N_values)))).fit()
    return GrowthReport(
        n=n,
        reps=reps,
        N_values=N_values,
        means=[float(m) for m in means],
        slope=float(fit.params[1]),
        intercept=float(fit.params[0]),
        r2=float(fit.rsquared),
    )
