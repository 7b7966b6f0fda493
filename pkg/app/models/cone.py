"""
Shape cones on a sorted abscissa vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from app.core.errors import ArgumentError


@dataclass(frozen=True)
class ConeConstraint:
    """Feasible set {θ : Gθ ≥ 0}.

    monotone: θ_{i+1} − θ_i ≥ 0.
    convex-second-difference: spacing-aware slope increments
    (θ_{i+1}−θ_i)/h_i − (θ_i−θ_{i−1})/h_{i−1} ≥ 0.
    """

    kind: Literal["monotone", "convex-second-difference"]
    abscissae: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.abscissae, dtype=float).ravel()
        if self.kind == "convex-second-difference" and np.any(np.diff(x) <= 0.0):
            raise ArgumentError("convex cones need strictly increasing abscissae")
        if self.kind == "monotone" and np.any(np.diff(x) < 0.0):
            raise ArgumentError("abscissae must be sorted")
        x.flags.writeable = False
        object.__setattr__(self, "abscissae", x)

    @property
    def dim(self) -> int:
        return int(self.abscissae.size)

    def constraint_values(self, v: np.ndarray) -> np.ndarray:
        """Gv; feasibility means every entry is nonnegative."""
        v = np.asarray(v, dtype=float)
        if self.kind == "monotone":
            return np.diff(v)
        slopes = np.diff(v) / np.diff(self.abscissae)
        return np.diff(slopes)

    def matrix(self) -> np.ndarray:
        """Dense G; only meant for small n."""
        return np.vstack([self.constraint_values(e) for e in np.eye(self.dim)]).T

    def violation(self, v: np.ndarray) -> float:
        g = self.constraint_values(v)
        return float(np.max(-g, initial=0.0))

    def contains(self, v: np.ndarray, tol: float = 1e-10) -> bool:
        return self.violation(v) <= tol
