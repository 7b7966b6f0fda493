"""
`maxineq`: Monte Carlo check of the finite-maximum inequality.

Either one MaxIneqConfig JSON (--in), a seeded batch of random configs
(--random COUNT) or the sqrt(log N) growth regression (--growth).
"""
import logging

import pandas as pd

from app.cli.deps import Outcome, load_model, reject_overrides
from app.core.errors import ArgumentError
from app.schemas.maxineq import MaxIneqConfig
from app.schemas.run import RunConfig
from app.services import maxineq_lab
from app.services.reports import json_text, model_json
from app.utils.csv_io import frame_text

logger = logging.getLogger(__name__)

NAME = "maxineq"


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="verify the finite-maximum bound")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="input", help="MaxIneqConfig JSON")
    source.add_argument("--random", type=int, default=None, help="number of random configs")
    source.add_argument("--growth", action="store_true", help="E max_j |G_n(eps f_j)| against sqrt(log N)")
    parser.add_argument("--reps", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=200, help="sample size of the growth regression")


def _growth(config: RunConfig) -> Outcome:
    reject_overrides(config)
    opts = config.options
    report = maxineq_lab.finite_max_growth(n=opts.get("n") or 200, reps=opts.get("reps") or 2000, seed=opts.get("seed", 0))
    logger.info("sqrt(log N) regression: slope %.4g, R^2 %.4f", report.slope, report.r2)
    text = model_json(report)
    return Outcome(stdout=text, files={"growth.json": text}, seeds={"seed": opts.get("seed", 0)})


def handle(config: RunConfig) -> Outcome:
    opts = config.options
    if opts.get("growth"):
        return _growth(config)
    reps = opts.get("reps") or 10_000
    if opts.get("random") is not None:
        reject_overrides(config)
        if opts["random"] < 1:
            raise ArgumentError("--random needs a positive count")
        configs = maxineq_lab.random_configs(opts["random"], seed=opts.get("seed", 0))
    else:
        configs = [load_model(config, MaxIneqConfig)]
    results = [maxineq_lab.verify_b1(c, reps) for c in configs]
    frame = pd.DataFrame(
        [
            {
                "n": r.config.n,
                "p": r.config.p,
                "q": r.config.q,
                "seed": r.config.seed,
                "mc_estimate": r.mc_estimate,
                "mc_se": r.mc_se,
                "bound": r.bound,
                "slack": r.slack,
                "alternative_bound": r.alternative_bound,
            }
            for r in results
        ]
    )
    summary = json_text({"configs": len(results), "min_slack": float(frame["slack"].min())})
    files = {"maxineq.csv": frame_text(frame), "maxineq.json": summary}
    if len(results) == 1:
        files["maxineq.json"] = model_json(results[0])
    return Outcome(
        stdout=files["maxineq.json"],
        files=files,
        seeds={"seed": opts.get("seed", 0), "config_seeds": [c.seed for c in configs]},
        resolved={"configs": [c.model_dump(mode="json") for c in configs]} if len(configs) == 1 else {},
    )
