"""
Fitted functions: knots, values and an extension rule to all of [0,1].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from app.core.errors import ArgumentError

Extension = Literal["piecewise-constant-left", "piecewise-linear-left-continuous"]


@dataclass(frozen=True)
class FittedFn:
    """A least squares fit as a function on [0,1].

    piecewise-constant-left: value θ_i on (x_{i-1}, x_i], θ_1 left of x_1
    and θ_n right of x_n (isotonic fits).
    piecewise-linear-left-continuous: linear interpolation between knots,
    the first and last pieces extended linearly (convex and Hölder fits).
    """

    knots: np.ndarray
    values: np.ndarray
    extension: Extension = "piecewise-linear-left-continuous"

    def __post_init__(self) -> None:
        knots = np.array(self.knots, dtype=float).ravel()
        values = np.array(self.values, dtype=float).ravel()
        if knots.size == 0 or knots.shape != values.shape:
            raise ArgumentError("knots and values must be nonempty and of equal length")
        if np.any(np.diff(knots) <= 0.0):
            raise ArgumentError("knots must be strictly increasing")
        knots.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    @property
    def degree(self) -> int:
        return 0 if self.extension == "piecewise-constant-left" else 1

    @property
    def breakpoints(self) -> np.ndarray:
        return self.knots

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k, v = self.knots, self.values
        if self.extension == "piecewise-constant-left":
            idx = np.minimum(np.searchsorted(k, t, side="left"), k.size - 1)
            return v[idx]
        if k.size == 1:
            return np.full_like(t, v[0])
        out = np.interp(t, k, v)
        first = (v[1] - v[0]) / (k[1] - k[0])
        last = (v[-1] - v[-2]) / (k[-1] - k[-2])
        out = np.where(t < k[0], v[0] + first * (t - k[0]), out)
        return np.where(t > k[-1], v[-1] + last * (t - k[-1]), out)
