"""
Pydantic schemas for the finite-maximum inequality checks.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ColumnFamily(BaseModel):
    """A block of `count` columns with i.i.d. entries scale·Z."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    law: Literal["gaussian", "sym_pareto", "rademacher"] = "gaussian"
    q_index: Optional[float] = Field(None, gt=2)
    scale: float = Field(1.0, gt=0)
    count: int = Field(..., gt=0)


class MaxIneqConfig(BaseModel):
    """n×p array of independent mean-zero entries and the moment order q."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(..., gt=0)
    p: int = Field(..., gt=0)
    q: float = Field(2.0, ge=2)
    families: List[ColumnFamily]
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _families_cover_columns(self) -> "MaxIneqConfig":
        total = sum(f.count for f in self.families)
        if total != self.p:
            raise ValueError(f"column families cover {total} columns, expected p={self.p}")
        for fam in self.families:
            if fam.law == "sym_pareto":
                if fam.q_index is None:
                    raise ValueError("sym_pareto columns need q_index")
                if fam.q_index <= self.q:
                    raise ValueError(
                        f"E[xi^q] is infinite: q={self.q:g} >= q_index={fam.q_index:g}"
                    )
        return self


class MaxIneqResult(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    config: MaxIneqConfig
    reps: int
    V: float
    sum_xi_q: float
    mc_estimate: float
    mc_se: float
    bound: float
    slack: float
    alternative_bound: float


class GrowthReport(BaseModel):
    """E max_j |G_n(ε f_j)| against sqrt(log N)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int
    reps: int
    N_values: List[int]
    means: List[float]
    slope: float
    intercept: float
    r2: float
