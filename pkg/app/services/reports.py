"""
Report writers and figure data.

Everything here returns text or frames; nothing carries a timestamp, so
rerunning a manifest reproduces the same bytes.
"""
from __future__ import annotations

import json
import platform
from importlib import metadata
from typing import Any, Dict, Iterable, Literal, Mapping, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.core.config import settings
from app.core.errors import ArgumentError
from app.schemas.experiment import RateReport, TailReport
from app.schemas.run import RunConfig
from app.utils.csv_io import frame_text

FigureKind = Literal["envelope_band", "rate_loglog", "tail_survival"]
FIGURE_KINDS = ("envelope_band", "rate_loglog", "tail_survival")
BAND_COLUMNS = ["delta", "x", "center", "lower", "upper"]

_PACKAGES = ("numpy", "scipy", "pandas", "statsmodels", "pydantic", "pydantic-settings")


def model_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, by_alias=True) + "\n"


def json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def rate_frame(report: RateReport) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in report.rows])


def raw_frame(report: RateReport) -> pd.DataFrame:
    return pd.DataFrame(
        [row.model_dump() for row in report.raw],
        columns=["n", "rep", "error", "status", "kkt_residual"],
    )


def profile_frame(profile) -> pd.DataFrame:
    return pd.DataFrame(
        {"delta": profile.deltas, "sup": profile.norm_sup, "l2": profile.norm_l2, "l3": profile.norm_l3}
    )


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _rate_loglog(report: RateReport) -> pd.DataFrame:
    log_n = np.log([row.n for row in report.rows])
    log_med = np.log([row.median_error for row in report.rows])
    if report.fitted_exponent is None:
        line = np.full_like(log_n, np.nan)
    else:
        # OLS passes through the centroid
        intercept = float(np.mean(log_med) - report.fitted_exponent * np.mean(log_n))
        line = intercept + report.fitted_exponent * log_n
    return pd.DataFrame({"log_n": log_n, "log_median_error": log_med, "fit_line": line})


def _tail_survival(report: TailReport) -> pd.DataFrame:
    dropped = set(report.dropped_thresholds)
    rows = []
    for curve in (report.main, report.twin):
        for d, s in zip(report.thresholds, curve.survival):
            if s > 0.0:
                rows.append(
                    {
                        "law": curve.law,
                        "log_threshold": float(np.log(d)),
                        "log_survival": float(np.log(s)),
                        "in_slope": d not in dropped,
                    }
                )
    return pd.DataFrame(rows, columns=["law", "log_threshold", "log_survival", "in_slope"])


def emit_figure_data(kind: FigureKind, source: Union[pd.DataFrame, RateReport, TailReport]) -> pd.DataFrame:
    """Plot-ready frame for one figure.

    envelope_band: (delta, x, center, lower, upper) from envelope_band().
    rate_loglog: (log_n, log_median_error, fit_line), one row per n.
    tail_survival: (law, log_threshold, log_survival, in_slope) for the
    main law and its gaussian twin; zero survivals are omitted.
    """
    if kind == "envelope_band":
        if not isinstance(source, pd.DataFrame) or set(BAND_COLUMNS) - set(source.columns):
            raise ArgumentError(f"envelope_band needs a frame with columns {BAND_COLUMNS}")
        return source[BAND_COLUMNS].reset_index(drop=True)
    if kind == "rate_loglog":
        if not isinstance(source, RateReport):
            raise ArgumentError("rate_loglog needs a RateReport")
        return _rate_loglog(source)
    if kind == "tail_survival":
        if not isinstance(source, TailReport):
            raise ArgumentError("tail_survival needs a TailReport")
        return _tail_survival(source)
    raise ArgumentError(f"unknown figure kind {kind!r}; choose from {FIGURE_KINDS}")


def figure_csv(kind: str, source) -> str:
    return frame_text(emit_figure_data(kind, source))


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------


def package_versions() -> Dict[str, str]:
    versions = {settings.APP_NAME: settings.APP_VERSION, "python": platform.python_version()}
    for name in _PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def build_manifest(
    config: RunConfig,
    outputs: Iterable[str],
    seeds: Mapping[str, Any],
    resolved: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """Everything needed to rerun a command: argv, resolved config, seeds, versions."""
    return {
        "command": config.command,
        "argv": list(config.argv),
        "input": config.input,
        "overrides": dict(config.overrides),
        "options": dict(config.options),
        "config": dict(resolved or {}),
        "seeds": dict(seeds),
        "versions": package_versions(),
        "outputs": sorted(outputs),
    }


def read_manifest(path) -> Dict[str, Any]:
    """Load a manifest written by a previous run.

    Raises:
        ArgumentError: missing file, invalid JSON or no stored argv
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise ArgumentError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(manifest.get("argv"), list):
        raise ArgumentError(f"manifest {path} has no argv list")
    return manifest
