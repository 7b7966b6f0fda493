"""
`interp`: randomized sweep over a sup-norm/L2 interpolation inequality.
"""
import logging

from app.cli.deps import Outcome, reject_overrides
from app.schemas.run import RunConfig
from app.services.interpolation import FAMILIES, check_interpolation
from app.services.reports import model_json

logger = logging.getLogger(__name__)

NAME = "interp"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="check an interpolation inequality on random members")
    parser.add_argument("--family", required=True, choices=FAMILIES)
    parser.add_argument("--lip", type=float, default=1.0)
    parser.add_argument("--d", type=int, default=2, help="number of additive components")
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--resolution", type=int, default=64, help="grid per axis (multiple_index)")


def handle(config: RunConfig) -> Outcome:
    reject_overrides(config)
    opts = config.options
    report = check_interpolation(
        opts["family"],
        lip=opts.get("lip", 1.0),
        d=opts.get("d", 2),
        samples=opts.get("samples", 10_000),
        seed=opts.get("seed", 0),
        resolution=opts.get("resolution", 64),
    )
    logger.info("%s: max ratio %.4f, %d violation(s)", report.family, report.max_ratio, report.violations)
    text = model_json(report)
    return Outcome(stdout=text, files={"interpolation.json": text}, seeds={"seed": opts.get("seed", 0)})
