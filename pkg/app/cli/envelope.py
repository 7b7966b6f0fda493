"""
`envelope`: local envelope values, profiles and band figures.

    envelope --class monotone --f0 zero --delta 0.1 --x 0.5
    envelope --class convex --phi 2 --f0 square --band --deltas 0.05,0.2
    envelope --class lipschitz --lip 1 --f0 zero --profile --fit-norm sup
"""
import logging

from app.cli.deps import Outcome, add_class_arguments, float_list, reject_overrides, shape_from_options
from app.core.errors import ArgumentError
from app.core.truths import TRUTHS
from app.schemas.run import RunConfig
from app.services import envelope_lab
from app.services.reports import figure_csv, json_text, model_json, profile_frame
from app.utils.csv_io import frame_text

logger = logging.getLogger(__name__)

NAME = "envelope"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="envelope F_delta around a center")
    add_class_arguments(parser)
    parser.add_argument("--f0", default="zero", choices=sorted(TRUTHS), help="center function")
    parser.add_argument("--method", choices=["analytic", "oracle"], default=None)
    parser.add_argument("--grid-m", dest="grid_m", type=int, default=None, help="oracle grid size")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--profile", action="store_true", help="norms over a delta grid with the growth fit")
    mode.add_argument("--band", action="store_true", help="per-delta band figure data")
    parser.add_argument("--delta", type=float, default=None)
    parser.add_argument("--x", type=float, default=None)
    parser.add_argument("--deltas", type=float_list, default=None, help="comma separated deltas")
    parser.add_argument("--fit-norm", dest="fit_norm", choices=["sup", "l2", "l3"], default="l2")


def _point(config: RunConfig) -> Outcome:
    opts = config.options
    if opts.get("delta") is None or opts.get("x") is None:
        raise ArgumentError("a point value needs --delta and --x")
    shape = shape_from_options(opts)
    method = opts.get("method") or "analytic"
    if method == "analytic":
        value = envelope_lab.envelope_analytic(shape, opts["f0"], opts["delta"], opts["x"])
    else:
        value = envelope_lab.envelope_oracle(shape, opts["f0"], opts["delta"], opts["x"], opts.get("grid_m") or 256)
    payload = {
        "class": shape.label(),
        "f0": opts["f0"],
        "method": method,
        "delta": opts["delta"],
        "x": opts["x"],
        "value": value,
    }
    text = json_text(payload)
    return Outcome(stdout=text, files={"envelope.json": text})


def _profile(config: RunConfig) -> Outcome:
    opts = config.options
    shape = shape_from_options(opts)
    profile = envelope_lab.build_profile(
        shape,
        opts["f0"],
        deltas=opts.get("deltas"),
        grid_m=opts.get("grid_m") or 256,
        method=opts.get("method") or "oracle",
        fit_norm=opts.get("fit_norm") or "l2",
    )
    summary = model_json(profile)
    return Outcome(
        stdout=summary,
        files={"profile.csv": frame_text(profile_frame(profile)), "profile.json": summary},
    )


def _band(config: RunConfig) -> Outcome:
    opts = config.options
    if not opts.get("deltas"):
        raise ArgumentError("--band needs --deltas")
    shape = shape_from_options(opts)
    band = envelope_lab.envelope_band(
        shape, opts["f0"], opts["deltas"], grid_m=opts.get("grid_m") or 128, method=opts.get("method") or "oracle"
    )
    text = figure_csv("envelope_band", band)
    return Outcome(stdout=text, files={"envelope_band.csv": text})


def handle(config: RunConfig) -> Outcome:
    reject_overrides(config)
    if config.options.get("profile"):
        return _profile(config)
    if config.options.get("band"):
        return _band(config)
    return _point(config)
