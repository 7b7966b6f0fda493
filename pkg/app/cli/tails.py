"""
`tails`: survival of the scaled errors at one n, with a gaussian twin.
"""
from app.cli.deps import Outcome, float_list, load_model
from app.cli.rates import spec_seeds
from app.schemas.experiment import ExperimentSpec
from app.schemas.run import RunConfig
from app.services.experiment_engine import run_tail_experiment
from app.services.reports import figure_csv, model_json

NAME = "tails"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="tail experiment at a single n")
    parser.add_argument("--in", dest="input", required=True, help="ExperimentSpec JSON (fit_rate false)")
    parser.add_argument("--n", type=int, default=None, help="sample size (default: last of n_grid)")
    parser.add_argument("--thresholds", type=float_list, default=None, help="comma separated thresholds")
    parser.add_argument("--workers", type=int, default=None)


def handle(config: RunConfig) -> Outcome:
    spec = load_model(config, ExperimentSpec)
    n = config.options.get("n") or spec.n_grid[-1]
    report = run_tail_experiment(
        spec, n, thresholds=config.options.get("thresholds"), workers=config.options.get("workers")
    )
    summary = model_json(report)
    return Outcome(
        stdout=summary,
        files={"tail_report.json": summary, "tail_survival.csv": figure_csv("tail_survival", report)},
        seeds=spec_seeds(spec),
        resolved=spec.model_dump(mode="json", by_alias=True),
    )
