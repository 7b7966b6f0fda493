"""
`rates`: Monte Carlo rate experiment from a JSON ExperimentSpec.
"""
import logging

from app.cli.deps import Outcome, load_model
from app.schemas.experiment import ExperimentSpec
from app.schemas.run import RunConfig
from app.services.experiment_engine import run_rate_experiment
from app.services.reports import figure_csv, model_json, rate_frame, raw_frame
from app.utils.csv_io import frame_text

logger = logging.getLogger(__name__)

NAME = "rates"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="rate experiment over the n grid")
    parser.add_argument("--in", dest="input", required=True, help="ExperimentSpec JSON")
    parser.add_argument("--raw", action="store_true", help="also write one row per (n, rep)")
    parser.add_argument("--workers", type=int, default=None, help="process count (default HEAVYLS_THREADS)")


def spec_seeds(spec: ExperimentSpec) -> dict:
    return {"master_seed": spec.master_seed, "noise_seed": spec.noise.seed, "design_seed": spec.design.seed}


def handle(config: RunConfig) -> Outcome:
    spec = load_model(config, ExperimentSpec)
    report = run_rate_experiment(
        spec,
        workers=config.options.get("workers"),
        raw=bool(config.options.get("raw")),
        progress=lambda line: logger.info("%s", line),
    )
    summary = model_json(report.model_copy(update={"raw": []}))
    files = {
        "rate_report.json": summary,
        "rates.csv": frame_text(rate_frame(report)),
        "rate_loglog.csv": figure_csv("rate_loglog", report),
    }
    if report.raw:
        files["raw.csv"] = frame_text(raw_frame(report))
    return Outcome(
        stdout=summary,
        files=files,
        seeds=spec_seeds(spec),
        resolved=spec.model_dump(mode="json", by_alias=True),
        degraded=report.degraded,
    )
