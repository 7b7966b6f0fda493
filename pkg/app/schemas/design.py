"""
Pydantic schema for the design distribution P_X on [0,1].
"""
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, stats


class _LinearDensity(stats.rv_continuous):
    """Density 1 + slope·(x − ½) on [0,1]; nonnegative for |slope| ≤ 2."""

    def _argcheck(self, slope):
        return np.abs(slope) <= 2.0

    def _pdf(self, x, slope):
        return 1.0 + slope * (x - 0.5)

    def _cdf(self, x, slope):
        return x + 0.5 * slope * (x * x - x)

    def _ppf(self, u, slope):
        # root of ½·slope·x² + (1 − ½·slope)·x = u, stable at slope = 0
        c = 1.0 - 0.5 * slope
        denom = c + np.sqrt(np.maximum(c * c + 2.0 * slope * u, 0.0))
        return np.where(denom > 0.0, 2.0 * u / np.where(denom > 0.0, denom, 1.0), 0.0)


linear_density = _LinearDensity(a=0.0, b=1.0, name="linear_density")


class DensitySpec(BaseModel):
    """A custom design density on [0,1] backed by a scipy distribution.

    `beta` uses shapes a and b; `linear` is 1 + slope·(x − ½).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Literal["beta", "linear"]
    a: float = Field(2.0, gt=0, description="beta shape a")
    b: float = Field(2.0, gt=0, description="beta shape b")
    slope: float = Field(0.0, ge=-2, le=2, description="slope of the linear density")

    def frozen(self):
        if self.name == "beta":
            return stats.beta(self.a, self.b)
        return linear_density(self.slope)


class Design(BaseModel):
    """Design of the abscissae.

    `uniform01` draws i.i.d. uniform points, `grid01` uses the midpoints
    (i + 1/2)/n, `custom-density` draws from `density`. The population
    norm of both uniform kinds is the Lebesgue L2 norm on [0,1].
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["uniform01", "grid01", "custom-density"] = "uniform01"
    npoints: int = Field(100, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    density: Optional[DensitySpec] = None

    @model_validator(mode="after")
    def _density_integrates_to_one(self) -> "Design":
        if self.kind != "custom-density":
            if self.density is not None:
                raise ValueError("density is only allowed for custom-density designs")
            return self
        if self.density is None:
            raise ValueError("custom-density designs need a density")
        dist = self.density.frozen()
        mass, _ = integrate.quad(dist.pdf, 0.0, 1.0, limit=200)
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"design density integrates to {mass!r}, not 1")
        return self

    @property
    def is_uniform(self) -> bool:
        return self.kind != "custom-density"

    def draw(self, rng: Optional[np.random.Generator] = None, n: Optional[int] = None) -> np.ndarray:
        """Draw sorted abscissae; `n` defaults to `npoints`, `rng` to `seed`."""
        n = self.npoints if n is None else int(n)
        if rng is None:
            rng = np.random.default_rng(self.seed)
        if self.kind == "grid01":
            return (np.arange(n) + 0.5) / n
        if self.kind == "uniform01":
            x = rng.uniform(0.0, 1.0, size=n)
        else:
            x = self.density.frozen().rvs(size=n, random_state=rng)
        return np.sort(np.clip(x, 0.0, 1.0))

    def pdf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.is_uniform:
            return np.ones_like(t)
        return self.density.frozen().pdf(t)

    def cdf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.is_uniform:
            return np.clip(t, 0.0, 1.0)
        return self.density.frozen().cdf(t)
