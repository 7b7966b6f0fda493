"""
Pydantic schemas for function classes and solver reports.
"""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ShapeClass(BaseModel):
    """Declarative description of the function class F.

    `phi` is the uniform sup-norm bound Φ; `gamma` and `lip` are the Hölder
    exponent and constant and apply to holder classes only.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["monotone", "convex", "holder"]
    phi: Optional[float] = Field(None, gt=0, description="sup-norm bound Φ")
    gamma: Optional[float] = Field(None, gt=0, le=1, description="Hölder exponent")
    lip: Optional[float] = Field(None, gt=0, description="Hölder/Lipschitz constant L")

    @model_validator(mode="after")
    def _holder_parameters(self) -> "ShapeClass":
        if self.kind == "holder":
            if self.gamma is None or self.lip is None:
                raise ValueError("holder classes need both gamma and lip")
        elif self.gamma is not None or self.lip is not None:
            raise ValueError(f"gamma/lip apply to holder classes only, not {self.kind}")
        return self

    @property
    def is_cone(self) -> bool:
        """True when the class without its box is a convex cone."""
        return self.kind in ("monotone", "convex")

    def label(self) -> str:
        if self.kind == "holder":
            return f"holder(gamma={self.gamma:g}, lip={self.lip:g})"
        return self.kind


class SolveReport(BaseModel):
    """Diagnostics of one shape-constrained fit."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    objective: float = Field(..., description="½ Σ w (y − θ)² at the returned θ")
    kkt_residual: float = Field(..., description="optimality gap of θ, scaled by max(1, ‖y‖_∞)")
    iterations: int = Field(..., description="kernel iterations, summed over Dykstra passes for boxed fits")
    status: Literal["converged", "max-iter", "infeasible"]

    @property
    def converged(self) -> bool:
        return self.status == "converged"
