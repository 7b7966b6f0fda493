"""
Pydantic schemas for Monte Carlo experiments and their reports.
"""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.truths import TRUTHS
from app.schemas.design import Design
from app.schemas.noise import NoiseMetadata, NoiseSpec
from app.schemas.rates import RatePrediction
from app.schemas.shape import ShapeClass


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------


class ExperimentSpec(BaseModel):
    """One Monte Carlo experiment as read from its JSON config.

    The JSON key for the function class is `class`.
    """
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    shape: ShapeClass = Field(..., alias="class")
    f0: str = Field(..., description="named truth function")
    design: Design = Design()
    noise: NoiseSpec = NoiseSpec()
    n_grid: List[int]
    reps: int = Field(..., gt=0)
    norm: Literal["population", "empirical"] = "population"
    misspecified: bool = False
    master_seed: int = Field(0, ge=0, lt=2**64)
    fit_rate: bool = Field(True, description="regress log median error on log n")
    truncation_c: Optional[float] = Field(
        None, gt=0, description="sup-norm bound Φ_n = C·sqrt(log n); convex default C = 4"
    )
    hill_k: Optional[int] = Field(None, gt=1)
    misspec_resolution: Optional[int] = Field(None, ge=32)

    @field_validator("f0")
    @classmethod
    def _known_truth(cls, v: str) -> str:
        if v not in TRUTHS:
            raise ValueError(f"unknown truth function {v!r}; choose from {sorted(TRUTHS)}")
        return v

    @field_validator("n_grid")
    @classmethod
    def _increasing_grid(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("n_grid must not be empty")
        if any(n < 3 for n in v):
            raise ValueError("every n in n_grid must be at least 3")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _rate_fit_requirements(self) -> "ExperimentSpec":
        if self.fit_rate:
            decades = math.log10(self.n_grid[-1] / self.n_grid[0])
            if decades < 1.5:
                raise ValueError(f"rate fitting needs n_grid spanning 1.5 decades, got {decades:.2f}")
            if self.reps < 50:
                raise ValueError(f"rate fitting needs reps >= 50, got {self.reps}")
        return self


# ---------------------------------------------------------------------------
# Rate experiment report
# ---------------------------------------------------------------------------


class RateRow(BaseModel):
    """Error statistics over the replications at one n."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int
    mean_error: float
    median_error: float
    q90_error: float
    mc_se: float = Field(..., description="Monte Carlo standard error of the mean error")
    failures: int = 0


class RawRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int
    rep: int
    error: float
    status: str
    kkt_residual: float


class RateReport(BaseModel):
    """Per-n statistics, fitted log-log slope and the theoretical prediction.

    `fitted_exponent` is the OLS slope of log median error on log n (so a
    rate n^{-1/2} shows up as -0.5); `margin` is fitted + predicted.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    spec: ExperimentSpec
    noise: NoiseMetadata
    rows: List[RateRow]
    raw: List[RawRow] = []
    fitted_exponent: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    r2: Optional[float] = None
    prediction: RatePrediction
    margin: Optional[float] = None
    within_ci: Optional[bool] = None
    degraded: bool = False
    notes: List[str] = []

    @property
    def predicted_exponent(self) -> float:
        return -self.prediction.exponent


# ---------------------------------------------------------------------------
# Tail experiment report
# ---------------------------------------------------------------------------


class TailCurve(BaseModel):
    """Survival of the scaled errors at the retained thresholds."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    law: str
    scaled_errors: List[float]
    survival: List[float]
    hill_index: Optional[float]
    hill_k: int
    tail_slope: Optional[float] = Field(None, description="log-log survival slope over the top decile")


class TailReport(BaseModel):
    """Tail behaviour of r_n‖f̂ − f0‖ at one n, with a gaussian twin."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    spec: ExperimentSpec
    n: int
    reps: int
    rate_exponent: float
    thresholds: List[float]
    dropped_thresholds: List[float] = []
    main: TailCurve
    twin: TailCurve
    twin_slope_same_range: Optional[float] = None
