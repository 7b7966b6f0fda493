"""
Predicted rates, moment thresholds and tail exponents of the LSE.

Rates are reported as n^{−exponent}·(log n)^{log_power} with the
constants (A, Φ, σ) set to 1; `rate_with_constants` keeps them. An
infinite moment order q (every moment finite) is passed as math.inf or
None.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd

from app.core.errors import ArgumentError, UnsupportedRegimeError
from app.schemas.rates import RatePrediction, RegimeInput

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

CLASS_NAMES = ("holder", "sobolev", "lipschitz_1d", "holder_union_indicators")
ETA_NOTE = "s = 1: the tail bound holds for every eta < q"


def _moments(q: Optional[float]) -> float:
    q = math.inf if q is None else float(q)
    if not q >= 2.0:
        raise ArgumentError(f"need q >= 2, got {q}")
    return q


def _check(alpha: float, s: float, bounded_alpha: bool = True) -> None:
    if not 0.0 <= s <= 1.0:
        raise ArgumentError(f"need 0 <= s <= 1, got {s}")
    if alpha < 0.0 or (bounded_alpha and alpha >= 2.0):
        raise ArgumentError(f"need 0 <= alpha < 2, got {alpha}")


def _finite(q: float) -> Optional[float]:
    return None if math.isinf(q) else q


def predict_classical(alpha: float, q: float) -> float:
    """Exponent 1/(α + 2q/(q−1)) available without any envelope growth (s = 0)."""
    q = _moments(q)
    _check(alpha, 0.0)
    if math.isinf(q):
        return 1.0 / (2.0 + alpha)
    return 1.0 / (alpha + 2.0 * q / (q - 1.0))


def predict_bracketing(alpha: float, s: float, q: Optional[float] = None, nu: float = 0.0) -> RatePrediction:
    """Bracketing entropy with an L_q envelope growth s.

    exponent = min{1/(2+α), (q−1)/(q(2−s)+α(q−1))}, threshold 2/s.
    """
    _check(alpha, s)
    q = _moments(q)
    minimax = 1.0 / (2.0 + alpha)
    notes: List[str] = []
    log_power = 0.0
    if math.isinf(q):
        exponent = minimax
        notes.append("every moment finite: n^{-1/(2+alpha)}")
    else:
        heavy = (q - 1.0) / (q * (2.0 - s) + alpha * (q - 1.0))
        exponent = min(minimax, heavy)
        if heavy < minimax - 1e-12:
            notes.append("moment branch (q-1)/(q(2-s)+alpha(q-1)) binds")
        else:
            notes.append("entropy branch 1/(2+alpha) binds")
        if nu > 0.0 and heavy <= minimax + 1e-12:
            log_power = nu / (2.0 - q * s + (2.0 + alpha) * (q - 1.0))
        if s == 0.0:
            notes.append("s = 0: two-moment exponent 1/(alpha + 2q/(q-1))")
    if s == 1.0:
        notes.append(ETA_NOTE)
    tail = None if math.isinf(q) else q - (0.1 if s == 1.0 else 0.0)
    return RatePrediction(
        entropy="bracketing_l2",
        alpha=alpha,
        s=s,
        q=_finite(q),
        exponent=exponent,
        minimax_exponent=minimax,
        moment_threshold=None if s == 0.0 else 2.0 / s,
        threshold_infinite=s == 0.0,
        tail_exponent=tail,
        log_power=log_power,
        regime_notes="; ".join(notes),
    )


def predict_supnorm(alpha: float, s: float, q: Optional[float] = None) -> RatePrediction:
    """Sup-norm entropy with an L_∞ envelope growth s.

    exponent = min{1/(2+α), (q−1)/(q(2−s)+αs(q−1))},
    threshold (2+α(1−s))/(s+α(1−s)), which is 1 + 2/α at s = 0.
    """
    _check(alpha, s)
    q = _moments(q)
    minimax = 1.0 / (2.0 + alpha)
    if math.isinf(q):
        exponent = minimax
        note = "every moment finite: n^{-1/(2+alpha)}"
    else:
        heavy = (q - 1.0) / (q * (2.0 - s) + alpha * s * (q - 1.0))
        exponent = min(minimax, heavy)
        note = (
            "moment branch (q-1)/(q(2-s)+alpha*s(q-1)) binds"
            if heavy < minimax - 1e-12
            else "entropy branch 1/(2+alpha) binds"
        )
    denominator = s + alpha * (1.0 - s)
    infinite = denominator == 0.0
    return RatePrediction(
        entropy="sup_norm",
        alpha=alpha,
        s=s,
        q=_finite(q),
        exponent=exponent,
        minimax_exponent=minimax,
        moment_threshold=None if infinite else (2.0 + alpha * (1.0 - s)) / denominator,
        threshold_infinite=infinite,
        tail_exponent=None if math.isinf(q) else q - (0.1 if s == 1.0 else 0.0),
        regime_notes=note + ("; " + ETA_NOTE if s == 1.0 else ""),
    )


def predict_vc(alpha: float, beta: float, s: float, nu: float = 0.0) -> RatePrediction:
    """Uniform (VC-type) entropy around f0; two moments suffice.

    α < 2: n^{−1/(2(2−s))}; α = 2: (√n / log n)^{1/(2−s)};
    α > 2: n^{−1/(α(2−s))}. Tails decay like D^{−4(2−s)/3}.

    Raises:
        UnsupportedRegimeError: α ≥ 2 together with β > 0
    """
    _check(alpha, s, bounded_alpha=False)
    if beta < 0.0:
        raise ArgumentError(f"need beta >= 0, got {beta}")
    if alpha >= 2.0 and beta > 0.0:
        raise UnsupportedRegimeError("no rate is available for alpha >= 2 with a log power beta > 0")
    if alpha < 2.0:
        exponent, log_power = 1.0 / (2.0 * (2.0 - s)), nu
        note = "alpha < 2: n^{-1/(2(2-s))}"
    elif alpha == 2.0:
        exponent, log_power = 1.0 / (2.0 * (2.0 - s)), 1.0 / (2.0 - s)
        note = "alpha = 2: (sqrt(n)/log n)^{1/(2-s)}"
    else:
        exponent, log_power = 1.0 / (alpha * (2.0 - s)), 0.0
        note = "alpha > 2: n^{-1/(alpha(2-s))}"
    return RatePrediction(
        entropy="vc_type",
        alpha=alpha,
        beta=beta,
        s=s,
        q=2.0,
        exponent=exponent,
        moment_threshold=2.0,
        tail_exponent=4.0 * (2.0 - s) / 3.0,
        log_power=log_power,
        regime_notes=note,
    )


def predict(regime: RegimeInput) -> RatePrediction:
    """Dispatch a validated RegimeInput to its predictor."""
    if regime.entropy == "bracketing_l2":
        return predict_bracketing(regime.alpha, regime.s, regime.q, regime.nu)
    if regime.entropy == "sup_norm":
        return predict_supnorm(regime.alpha, regime.s, regime.q)
    return predict_vc(regime.alpha, regime.beta, regime.s, regime.nu)


def holder_supnorm_threshold(gamma: float, d: int) -> float:
    """2 + (2dγ − d²)/(2γ² + d²): moments for the minimax Hölder rate."""
    return 2.0 + (2.0 * d * gamma - d * d) / (2.0 * gamma * gamma + d * d)


def additive_threshold(gamma: float) -> float:
    """2 + (2γ − 1)/(2γ² + 1): moments for the additive-model rate."""
    return 2.0 + (2.0 * gamma - 1.0) / (2.0 * gamma * gamma + 1.0)


def rate_with_constants(
    entropy: str,
    n: float,
    alpha: float,
    s: float,
    q: Optional[float] = None,
    A: float = 1.0,
    phi: float = 1.0,
    sigma: float = 1.0,
    nu: float = 0.0,
    beta: float = 0.0,
) -> float:
    """Error scale ε_n = 1/r_n with the constants kept.

    bracketing_l2 carries the (log n)^ν envelope correction; vc_type
    covers α < 2, α = 2 and α > 2.
    """
    if n <= 1.0:
        raise ArgumentError(f"need n > 1, got {n}")
    if A <= 0.0 or phi <= 0.0 or sigma < 0.0:
        raise ArgumentError("need A > 0, phi > 0 and sigma >= 0")
    log_n = math.log(n)

    if entropy == "bracketing_l2":
        _check(alpha, s)
        q = _moments(q)
        terms = [(sigma + phi) ** (2.0 / (2.0 + alpha)) * (A / n) ** (1.0 / (2.0 + alpha))]
        if not math.isinf(q):
            terms.append(phi ** (2.0 / (2.0 - s)) * (n ** (q - 1.0) * log_n ** (-nu)) ** (-1.0 / (q * (2.0 - s))))
            power = 1.0 / (2.0 - q * s + (2.0 + alpha) * (q - 1.0))
            terms.append((A ** (q - 1.0) * phi ** (2.0 * q) * log_n ** nu / n ** (q - 1.0)) ** power)
        return max(terms)

    if entropy == "sup_norm":
        _check(alpha, s)
        q = _moments(q)
        terms = [(sigma + phi) ** (2.0 / (2.0 + alpha)) * (A / n) ** (1.0 / (2.0 + alpha))]
        if not math.isinf(q):
            terms.append(phi ** (2.0 / (2.0 - s)) * n ** (-(q - 1.0) / (q * (2.0 - s))))
            denom = q * (2.0 - s) + alpha * s * (q - 1.0)
            terms.append(
                phi ** ((q * (2.0 - s) + alpha * (s - 1.0) * (q - 1.0)) / denom) * (A / n) ** ((q - 1.0) / denom)
            )
        return max(terms)

    if entropy == "vc_type":
        _check(alpha, s, bounded_alpha=False)
        if alpha >= 2.0 and beta > 0.0:
            raise UnsupportedRegimeError("no rate is available for alpha >= 2 with a log power beta > 0")
        power = 1.0 / (2.0 * (2.0 - s))
        if alpha < 2.0:
            lead = (A * phi ** 2 / n) ** power * log_n ** nu
        elif alpha == 2.0:
            lead = (A * phi ** 2 * math.log(n / A) ** 2 / n) ** power
        else:
            lead = (A ** (2.0 / alpha) * phi ** 2 / n ** (2.0 / alpha)) ** power
        return max(lead, phi / math.sqrt(n), (phi ** 4.5 / n) ** power)

    raise ArgumentError(f"unknown entropy regime {entropy!r}")


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def _fraction(value: Number) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value).limit_denominator(10**6)


def table_lookup(name: str, gamma: Number = 1, d: int = 1) -> Tuple[Fraction, Fraction]:
    """(α, s) of a named class.

    holder: (d/γ, 2γ/(2γ+d)); sobolev: (d/γ, (2γ−1)/(2γ+d−1));
    lipschitz_1d: (1, 2/3); holder_union_indicators: (1/γ, 0).

    Raises:
        ArgumentError: unknown class or out-of-range parameters
    """
    g = _fraction(gamma)
    if g <= 0 or d < 1:
        raise ArgumentError(f"need gamma > 0 and d >= 1, got gamma={gamma}, d={d}")
    if name == "holder":
        return Fraction(d) / g, 2 * g / (2 * g + d)
    if name == "sobolev":
        if 2 * g <= 1:
            raise ArgumentError("sobolev classes need gamma > 1/2")
        return Fraction(d) / g, (2 * g - 1) / (2 * g + d - 1)
    if name == "lipschitz_1d":
        return Fraction(1), Fraction(2, 3)
    if name == "holder_union_indicators":
        return 1 / g, Fraction(0)
    raise ArgumentError(f"unknown class {name!r}; choose from {CLASS_NAMES}")


def required_moments(name: str, gamma: Number = 1, d: int = 1) -> Optional[Fraction]:
    """2/s, the moments needed here for the n^{−1/(2+α)} rate; None when s = 0."""
    _, s = table_lookup(name, gamma, d)
    return None if s == 0 else 2 / s


def independent_error_moments(name: str, gamma: Number = 1, d: int = 1) -> Fraction:
    """Moments needed when ε is independent of X: 1 + 2γ/d, Lipschitz 3, union 1 + 2γ."""
    table_lookup(name, gamma, d)
    g = _fraction(gamma)
    if name in ("holder", "sobolev"):
        return 1 + 2 * g / d
    if name == "lipschitz_1d":
        return Fraction(3)
    return 1 + 2 * g


def regime_table() -> List[Dict[str, str]]:
    """The three entropy regimes with their moment threshold, rate and tail."""
    return [
        {
            "entropy": "bracketing_l2",
            "envelope_growth": "||(|eps| + Phi) F_delta(X)||_q <= C Phi^2 delta^s",
            "moment_threshold": "2/s",
            "rate": "n^(-1/(2+alpha))",
            "tail_exponent": "q - 1{s=1}/10",
        },
        {
            "entropy": "sup_norm",
            "envelope_growth": "||F_delta||_inf <= C Phi^(1-s) delta^s",
            "moment_threshold": "(2+alpha(1-s))/(s+alpha(1-s))",
            "rate": "n^(-1/(2+alpha))",
            "tail_exponent": "q - 1{s=1}/10",
        },
        {
            "entropy": "vc_type",
            "envelope_growth": "||F_delta|| <= C Phi^(1-s) delta^s",
            "moment_threshold": "2",
            "rate": "n^(-1/(2(2-s)))",
            "tail_exponent": "4(2-s)/3",
        },
    ]


def _render(value: Optional[Fraction]) -> str:
    if value is None:
        return "inf"
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


TABLE_INSTANCES: Tuple[Tuple[str, Fraction, int], ...] = (
    ("holder", Fraction(1), 1),
    ("holder", Fraction(2), 1),
    ("holder", Fraction(1), 2),
    ("holder", Fraction(2), 3),
    ("sobolev", Fraction(1), 1),
    ("sobolev", Fraction(2), 1),
    ("sobolev", Fraction(2), 2),
    ("lipschitz_1d", Fraction(1), 1),
    ("holder_union_indicators", Fraction(1, 2), 1),
    ("holder_union_indicators", Fraction(1), 1),
)


def tables() -> Dict[str, pd.DataFrame]:
    """Envelope growth (table1), regimes (table2) and moment requirements (table3).

    Every number is an exact rational rendered as p/q.
    """
    table1, table3 = [], []
    for name, gamma, d in TABLE_INSTANCES:
        alpha, s = table_lookup(name, gamma, d)
        key = {"class": name, "gamma": _render(gamma), "d": str(d)}
        if name != "holder_union_indicators":
            table1.append({**key, "s": _render(s)})
        table3.append(
            {
                **key,
                "alpha": _render(alpha),
                "s": _render(s),
                "independent_errors": _render(independent_error_moments(name, gamma, d)),
                "required_moments": _render(required_moments(name, gamma, d)),
            }
        )
    return {
        "table1": pd.DataFrame(table1),
        "table2": pd.DataFrame(regime_table()),
        "table3": pd.DataFrame(table3),
    }
