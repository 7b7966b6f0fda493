"""
`predict`: rate exponent and moment threshold of an entropy regime.
"""
import math

from app.cli.deps import Outcome, reject_overrides
from app.schemas.rates import RegimeInput
from app.schemas.run import RunConfig
from app.services import rate_theory
from app.services.reports import json_text

NAME = "predict"

REGIMES = {
    "bracketing": "bracketing_l2",
    "bracketing_l2": "bracketing_l2",
    "supnorm": "sup_norm",
    "sup_norm": "sup_norm",
    "vc": "vc_type",
    "vc_type": "vc_type",
}


def _moment(value: str):
    """None stands for every moment finite."""
    return None if value.lower() in ("inf", "infinity") else float(value)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="predicted rate for an entropy regime")
    parser.add_argument("--regime", required=True, choices=sorted(REGIMES))
    parser.add_argument("--alpha", type=float, required=True)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--s", type=float, required=True)
    parser.add_argument("--q", type=_moment, default=None, help="moment order; inf for all moments")
    parser.add_argument("--nu", type=float, default=0.0)
    parser.add_argument("--n", type=float, default=None, help="also report the error scale at this n")
    parser.add_argument("--A", dest="A", type=float, default=1.0)
    parser.add_argument("--phi", type=float, default=1.0)
    parser.add_argument("--sigma", type=float, default=1.0)


def handle(config: RunConfig) -> Outcome:
    reject_overrides(config)
    opts = config.options
    regime = RegimeInput(
        entropy=REGIMES[opts["regime"]],
        alpha=opts["alpha"],
        beta=opts.get("beta", 0.0),
        s=opts["s"],
        q=math.inf if opts.get("q") is None else opts["q"],
        nu=opts.get("nu", 0.0),
    )
    prediction = rate_theory.predict(regime)
    payload = prediction.model_dump(mode="json")
    if opts.get("n") is not None:
        payload["error_scale"] = rate_theory.rate_with_constants(
            regime.entropy,
            opts["n"],
            regime.alpha,
            regime.s,
            regime.q,
            A=opts.get("A", 1.0),
            phi=opts.get("phi", 1.0),
            sigma=opts.get("sigma", 1.0),
            nu=regime.nu,
            beta=regime.beta,
        )
    text = json_text(payload)
    return Outcome(stdout=text, files={"prediction.json": text})
