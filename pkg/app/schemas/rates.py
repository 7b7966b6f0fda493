"""
Pydantic schemas for rate predictions.
"""
import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class RegimeInput(BaseModel):
    """Entropy regime with its complexity, envelope growth and moment order."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    entropy: Literal["bracketing_l2", "sup_norm", "vc_type"]
    alpha: float = Field(..., ge=0)
    beta: float = Field(0.0, ge=0)
    s: float = Field(..., ge=0, le=1)
    q: float = Field(2.0, ge=2)
    nu: float = Field(0.0, ge=0, description="extra log power of the envelope")


class RatePrediction(BaseModel):
    """Predicted polynomial rate ‖f̂ − f0‖ ≍ n^{−exponent}·(log n)^{log_power}.

    An infinite moment threshold is carried as `moment_threshold=None`
    with `threshold_infinite=True`.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    entropy: Literal["bracketing_l2", "sup_norm", "vc_type"]
    alpha: float
    beta: float = 0.0
    s: float
    q: Optional[float] = None
    exponent: float
    minimax_exponent: Optional[float] = None
    moment_threshold: Optional[float] = None
    threshold_infinite: bool = False
    tail_exponent: Optional[float] = Field(None, description="polynomial tail decay power; None when faster than any power")
    log_power: float = 0.0
    regime_notes: str = ""

    @property
    def threshold_value(self) -> float:
        return math.inf if self.threshold_infinite else float(self.moment_threshold)
