"""
`fit`: least squares fit of an (x, y) CSV over a shape class.
"""
import logging

import pandas as pd

from app.cli.deps import Outcome, add_class_arguments, reject_overrides, shape_from_options
from app.core.errors import ArgumentError
from app.models import Sample
from app.schemas.run import RunConfig
from app.services.reports import model_json
from app.services.shape_solvers import fit_shape
from app.utils.csv_io import frame_text, read_xy

logger = logging.getLogger(__name__)

NAME = "fit"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="fit the class LSE to an x,y CSV")
    add_class_arguments(parser)
    parser.add_argument("--in", dest="input", required=True, help="CSV with header x,y")


def handle(config: RunConfig) -> Outcome:
    reject_overrides(config)
    if config.input is None:
        raise ArgumentError("fit needs --in PATH")
    shape = shape_from_options(config.options)
    x, y = read_xy(config.input)
    sample = Sample.from_arrays(x, y)
    fitted, report = fit_shape(sample, shape)
    logger.info(
        "%s fit of %d points: %s after %d iterations (kkt %.3g)",
        shape.label(), sample.n, report.status, report.iterations, report.kkt_residual,
    )
    table = frame_text(pd.DataFrame({"x": sample.x, "y": sample.y, "fitted": fitted(sample.x)}))
    return Outcome(
        stdout=table,
        files={"fit.csv": table, "fit_report.json": model_json(report)},
        resolved={"class": shape.model_dump(mode="json")},
        degraded=not report.converged,
    )
