"""
Monte Carlo driver for rate and tail experiments.

Every (n, rep) replication draws from its own stream
replication_rng(master_seed, n, rep) and results are merged in (n, rep)
order, so serial and parallel runs produce identical reports.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import statsmodels.api as sm

from app.core.config import settings
from app.core.errors import ArgumentError, ConfigurationError, FitError
from app.core.rng import replication_rng
from app.core.truths import Truth, truth
from app.models import FittedFn, Sample, TruthRef
from app.schemas.experiment import (
    ExperimentSpec,
    RateReport,
    RateRow,
    RawRow,
    TailCurve,
    TailReport,
)
from app.schemas.noise import NoiseSpec
from app.schemas.rates import RatePrediction
from app.schemas.shape import ShapeClass
from app.services import rate_theory
from app.services.geometry import empirical_l2_distance, population_l2_distance
from app.services.noise_lab import describe_noise, draw_errors, survival_slope
from app.services.shape_solvers import fit_shape

logger = logging.getLogger(__name__)

Target = Union[Truth, FittedFn]

MIN_EXCEEDANCES = 20
MIN_TAIL_REPS = 1000
HOLDOUT_FACTOR = 4


# ---------------------------------------------------------------------------
# Estimators on replication output
# ---------------------------------------------------------------------------


def hill_estimator(values, k: int) -> float:
    """Hill tail index k / Σ_{i≤k} (log X_(i) − log X_(k+1)) over the top order statistics.

    Raises:
        ArgumentError: k < 1 or fewer than k + 1 positive values
        FitError: the top k + 1 values are all equal
    """
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    v = v[v > 0.0]
    if k < 1 or v.size < k + 1:
        raise ArgumentError(f"Hill estimator needs k >= 1 and k + 1 positive values, got k={k}, {v.size} values")
    logs = np.log(v[: k + 1])
    spread = float(np.sum(logs[:k] - logs[k]))
    if spread <= 0.0:
        raise FitError("top order statistics are all equal; tail index undefined")
    return k / spread


def default_hill_k(reps: int) -> int:
    return max(20, int(math.floor(0.05 * reps)))


def fit_rate_exponent(ns: Sequence[float], medians: Sequence[float]) -> Tuple[float, Tuple[float, float], float]:
    """OLS slope of log median error on log n with HC1 standard errors.

    Returns:
        (slope, (ci_low, ci_high), r2) with a 95% interval

    Raises:
        FitError: fewer than three points or nonpositive medians
    """
    ns = np.asarray(ns, dtype=float)
    medians = np.asarray(medians, dtype=float)
    if ns.size < 3 or ns.size != medians.size:
        raise FitError(f"need at least three (n, median) pairs, got {ns.size}")
    if np.any(medians <= 0.0) or not np.all(np.isfinite(medians)):
        raise FitError("median errors must be positive and finite")
    fit = sm.OLS(np.log(medians), sm.add_constant(np.log(ns))).fit(cov_type="HC1")
    low, high = fit.conf_int(alpha=0.05)[1]
    return float(fit.params[1]), (float(low), float(high)), float(fit.rsquared)


# ---------------------------------------------------------------------------
# Predictions and targets
# ---------------------------------------------------------------------------


def predict_for_spec(spec: ExperimentSpec) -> RatePrediction:
    """Map (class, truth, noise) to its entropy regime and predicted rate.

    monotone, constant truth: vc (α=0, β=1, s=1); monotone otherwise:
    bracketing (α=1, s=0); convex: bracketing (α=½, s=⅔, ν=⅓);
    Hölder(γ): sup-norm (α=1/γ, s=2γ/(2γ+1)). q is the noise moment index.
    """
    meta = describe_noise(spec.noise)
    q = math.inf if meta.moment_index is None else meta.moment_index
    if q < 2.0:
        raise ConfigurationError(f"{meta.law} has fewer than two moments; no rate is predicted")
    shape = spec.shape
    if shape.kind == "monotone":
        if truth(spec.f0).constant:
            return rate_theory.predict_vc(0.0, 1.0, 1.0)
        return rate_theory.predict_bracketing(1.0, 0.0, q)
    if shape.kind == "convex":
        return rate_theory.predict_bracketing(0.5, 2.0 / 3.0, q, nu=1.0 / 3.0)
    gamma = shape.gamma
    return rate_theory.predict_supnorm(1.0 / gamma, 2.0 * gamma / (2.0 * gamma + 1.0), q)


def misspecified_target(shape_class: ShapeClass, f0: Union[str, Truth], resolution: Optional[int] = None) -> FittedFn:
    """f̄: the class LSE of noiseless f0 values on a dense midpoint grid.

    All-pairs Hölder classes (γ < 1) use at most
    settings.MISSPEC_PAIRS_RESOLUTION grid points, and never more than
    settings.HOLDER_MAX_N.
    """
    f0 = f0 if isinstance(f0, Truth) else truth(f0)
    m = settings.MISSPEC_RESOLUTION if resolution is None else int(resolution)
    if shape_class.kind == "holder" and shape_class.gamma < 1.0:
        cap = min(settings.MISSPEC_PAIRS_RESOLUTION, settings.HOLDER_MAX_N)
        if m > cap:
            logger.info("misspecified target grid reduced from %d to %d points", m, cap)
            m = cap
    t = (np.arange(m) + 0.5) / m
    sample = Sample.from_arrays(t, f0(t), TruthRef(f0.name))
    fitted, report = fit_shape(sample, shape_class)
    if not report.converged:
        logger.warning("misspecified target for %s did not converge (kkt %.3g)", f0.name, report.kkt_residual)
    return fitted


def sup_bound(spec: ExperimentSpec, n: int) -> Optional[float]:
    """Φ of the fit at sample size n: the class bound or C·sqrt(log n)."""
    c = spec.truncation_c
    if c is None and spec.shape.kind == "convex" and spec.shape.phi is None:
        c = settings.TRUNCATION_C
    if c is not None:
        return c * math.sqrt(math.log(n))
    return spec.shape.phi


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------


def _replicate(spec: ExperimentSpec, n: int, rep: int, target: Optional[FittedFn]) -> RawRow:
    rng = replication_rng(spec.master_seed, n, rep)
    f0 = truth(spec.f0)
    x = spec.design.draw(rng, n)
    y = f0(x) + draw_errors(spec.noise, x, rng)
    sample = Sample.from_arrays(x, y, TruthRef(spec.f0, spec.noise))
    fitted, report = fit_shape(sample, spec.shape, sup_bound(spec, n))
    reference: Target = f0 if target is None else target
    if spec.norm == "population":
        error = population_l2_distance(fitted, reference, measure=spec.design)
    else:
        error = empirical_l2_distance(fitted, reference, spec.design.draw(rng, HOLDOUT_FACTOR * n))
    return RawRow(n=n, rep=rep, error=error, status=report.status, kkt_residual=report.kkt_residual)


def _replicate_task(args) -> RawRow:
    return _replicate(*args)


def run_replications(
    spec: ExperimentSpec,
    ns: Iterable[int],
    target: Optional[FittedFn] = None,
    workers: Optional[int] = None,
) -> List[RawRow]:
    """All (n, rep) replications, sorted by (n, rep)."""
    tasks = [(spec, int(n), rep, target) for n in ns for rep in range(spec.reps)]
    workers = settings.THREADS if workers is None else workers
    if workers == 1 or len(tasks) == 1:
        rows = [_replicate_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_replicate_task, tasks, chunksize=max(1, len(tasks) // 256)))
    return sorted(rows, key=lambda row: (row.n, row.rep))


def _summarize(n: int, rows: List[RawRow]) -> RateRow:
    errors = np.array([row.error for row in rows])
    return RateRow(
        n=n,
        mean_error=float(errors.mean()),
        median_error=float(np.median(errors)),
        q90_error=float(np.quantile(errors, 0.9)),
        mc_se=float(errors.std(ddof=1) / math.sqrt(errors.size)) if errors.size > 1 else 0.0,
        failures=sum(row.status != "converged" for row in rows),
    )


def _check_budget(spec: ExperimentSpec, sizes: int) -> None:
    fits = sizes * spec.reps
    if fits > settings.FIT_BUDGET:
        raise ArgumentError(f"{fits} fits exceed the configured budget of {settings.FIT_BUDGET}")


def run_rate_experiment(
    spec: ExperimentSpec,
    workers: Optional[int] = None,
    raw: bool = False,
    progress: Optional[Callable[[str], None]] = None,
) -> RateReport:
    """Fit the class LSE over the n grid and regress log median error on log n.

    A run in which more than settings.DEGRADED_FRACTION of the fits did not
    converge is marked degraded.
    """
    _check_budget(spec, len(spec.n_grid))
    meta = describe_noise(spec.noise)
    prediction = predict_for_spec(spec)
    target = None
    if spec.misspecified:
        target = misspecified_target(spec.shape, spec.f0, spec.misspec_resolution)
    logger.info(
        "rate experiment: %s, f0=%s, %s, n=%s, reps=%d",
        spec.shape.label(), spec.f0, meta.law, spec.n_grid, spec.reps,
    )
    rows = run_replications(spec, spec.n_grid, target, workers)
    summary = [_summarize(n, [r for r in rows if r.n == n]) for n in spec.n_grid]
    if progress is not None:
        for row in summary:
            progress(f"n={row.n} median={row.median_error:.4g} failures={row.failures}")

    notes: List[str] = []
    failures = sum(row.failures for row in summary)
    degraded = failures > settings.DEGRADED_FRACTION * len(rows)
    if degraded:
        notes.append(f"{failures} of {len(rows)} fits did not converge")
        logger.warning("experiment degraded: %d of %d fits did not converge", failures, len(rows))

    fitted = ci = r2 = margin = within = None
    if meta.sup_sigma == 0.0:
        notes.append("noiseless run: exponent fit skipped")
    elif spec.fit_rate:
        try:
            fitted, ci, r2 = fit_rate_exponent(spec.n_grid, [row.median_error for row in summary])
        except FitError as exc:
            notes.append(f"exponent fit failed: {exc}")
            logger.warning("exponent fit failed: %s", exc)
        else:
            margin = fitted + prediction.exponent
            within = ci[0] <= -prediction.exponent <= ci[1]

    return RateReport(
        spec=spec,
        noise=meta,
        rows=summary,
        raw=rows if raw else [],
        fitted_exponent=fitted,
        ci_low=None if ci is None else ci[0],
        ci_high=None if ci is None else ci[1],
        r2=r2,
        prediction=prediction,
        margin=margin,
        within_ci=within,
        degraded=degraded,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Tails
# ---------------------------------------------------------------------------


def dyadic_thresholds(scaled: np.ndarray) -> List[float]:
    """Powers of two from the median up to the largest scaled error."""
    positive = scaled[scaled > 0.0]
    if positive.size == 0:
        return [1.0]
    low = math.floor(math.log2(max(float(np.median(scaled)), float(positive.min()))))
    high = math.ceil(math.log2(float(positive.max())))
    return [2.0 ** j for j in range(low, high + 1)]


def _curve(law: str, scaled: np.ndarray, thresholds: Sequence[float], k: int) -> TailCurve:
    survival = [float(np.mean(scaled >= d)) for d in thresholds]
    try:
        hill: Optional[float] = hill_estimator(scaled, k)
    except (ArgumentError, FitError):
        hill = None
    return TailCurve(
        law=law,
        scaled_errors=[float(v) for v in scaled],
        survival=survival,
        hill_index=hill,
        hill_k=k,
        tail_slope=survival_slope(scaled, 0.1),
    )


def _slope_over(thresholds: Sequence[float], survival: Sequence[float]) -> Optional[float]:
    pts = [(d, s) for d, s in zip(thresholds, survival) if s > 0.0]
    if len(pts) < 2:
        return None
    d, s = np.log(np.array(pts)).T
    return float(sm.OLS(s, sm.add_constant(d)).fit().params[1])


def run_tail_experiment(
    spec: ExperimentSpec,
    n: int,
    thresholds: Optional[Sequence[float]] = None,
    workers: Optional[int] = None,
) -> TailReport:
    """Survival of r_n‖f̂ − f0‖ at one n, with a gaussian-noise twin.

    r_n is n^{e} with the constant-free predicted exponent e. Thresholds
    with fewer than 20 exceedances are kept in the curve but dropped from
    the slope fits.
    """
    if spec.reps < MIN_TAIL_REPS:
        raise ArgumentError(f"tail experiments need reps >= {MIN_TAIL_REPS}, got {spec.reps}")
    _check_budget(spec, 2)
    exponent = predict_for_spec(spec).exponent
    scale = float(n) ** exponent
    k = spec.hill_k or default_hill_k(spec.reps)

    main = np.array([row.error for row in run_replications(spec, [n], None, workers)]) * scale
    twin_spec = spec.model_copy(
        update={"noise": NoiseSpec(law="gaussian", sigma_fn=spec.noise.sigma_fn, seed=spec.noise.seed)}
    )
    twin = np.array([row.error for row in run_replications(twin_spec, [n], None, workers)]) * scale

    thresholds = sorted(float(d) for d in (thresholds or dyadic_thresholds(main)))
    dropped = [d for d in thresholds if int(np.sum(main >= d)) < MIN_EXCEEDANCES]
    if dropped:
        logger.warning("dropping %d thresholds with fewer than %d exceedances", len(dropped), MIN_EXCEEDANCES)
    main_curve = _curve(spec.noise.label(), main, thresholds, k)
    twin_curve = _curve("gaussian", twin, thresholds, k)
    kept = [i for i, d in enumerate(thresholds) if d not in dropped]
    return TailReport(
        spec=spec,
        n=n,
        reps=spec.reps,
        rate_exponent=exponent,
        thresholds=thresholds,
        dropped_thresholds=dropped,
        main=main_curve,
        twin=twin_curve,
        twin_slope_same_range=_slope_over(
            [thresholds[i] for i in kept], [twin_curve.survival[i] for i in kept]
        ),
    )
