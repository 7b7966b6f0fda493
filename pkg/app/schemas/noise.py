"""
Pydantic schemas for error laws.
"""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SigmaSpec(BaseModel):
    """Conditional scale σ(x).

    `constant` uses σ(x) = sigma; `xdep` uses a named built-in with
    sup σ = sigma:
      - linear: sigma·(0.2 + 0.8x)
      - sine2:  sigma·(0.2 + 0.8 sin²(2πx))
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant", "xdep"] = "constant"
    sigma: float = Field(1.0, ge=0)
    name: Optional[Literal["linear", "sine2"]] = None

    @model_validator(mode="after")
    def _named_xdep(self) -> "SigmaSpec":
        if self.kind == "xdep" and self.name is None:
            raise ValueError("xdep sigma needs a name (linear | sine2)")
        if self.kind == "constant" and self.name is not None:
            raise ValueError("constant sigma takes no name")
        return self


class NoiseSpec(BaseModel):
    """Error law ε = σ(X)·Z with Z symmetric about zero."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    law: Literal["gaussian", "student_t", "sym_pareto", "two_moment_log"] = "gaussian"
    df: Optional[float] = Field(None, gt=0, description="student_t degrees of freedom")
    q_index: Optional[float] = Field(None, gt=0, description="sym_pareto tail index")
    sigma_fn: SigmaSpec = SigmaSpec()
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _law_parameters(self) -> "NoiseSpec":
        if self.law == "student_t" and self.df is None:
            raise ValueError("student_t needs df")
        if self.law == "sym_pareto" and self.q_index is None:
            raise ValueError("sym_pareto needs q_index")
        return self

    def label(self) -> str:
        if self.law == "student_t":
            return f"student_t(df={self.df:g})"
        if self.law == "sym_pareto":
            return f"sym_pareto(q={self.q_index:g})"
        return self.law


class NoiseMetadata(BaseModel):
    """What a noise spec guarantees; recorded in every report.

    `moment_index` is the boundary q of the finite absolute moments
    (None when every moment is finite).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    law: str
    sup_sigma: float
    moment_index: Optional[float]
    cvar_ok: bool
    standardization: float
