"""
Pydantic schemas for envelope profiles and interpolation checks.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.shape import ShapeClass


class EnvelopeProfile(BaseModel):
    """Envelope norms ‖F_δ‖ over a δ grid plus the fitted growth exponent."""
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    shape: ShapeClass = Field(..., alias="class")
    center: str
    method: Literal["analytic", "oracle"]
    grid_m: int
    deltas: List[float]
    norm_sup: List[float]
    norm_l2: List[float]
    norm_l3: List[float]
    fit_norm: Literal["sup", "l2", "l3"] = "l2"
    s_hat: Optional[float] = None
    log_correction: Optional[float] = None
    r2: Optional[float] = None

    def norms(self, which: Optional[str] = None) -> List[float]:
        return getattr(self, f"norm_{which or self.fit_norm}")


class InterpolationReport(BaseModel):
    """Outcome of a randomized sweep over an interpolation inequality.

    `max_ratio` is the largest observed ‖f‖_∞ / bound(f); values above 1
    are violations.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    family: str
    samples: int
    constant: float
    exponent: float
    max_ratio: float
    violations: int
    worst: Optional[dict] = None
