"""
Regression samples.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.core.errors import ArgumentError
from app.schemas.noise import NoiseSpec


@dataclass(frozen=True)
class TruthRef:
    """Generating metadata: the name of f0 and the noise spec used."""

    f0: str
    noise: Optional[NoiseSpec] = None


@dataclass(frozen=True)
class Sample:
    """Pairs (x_i, y_i) sorted by x; x in [0,1], ties allowed."""

    x: np.ndarray
    y: np.ndarray
    truth: Optional[TruthRef] = None

    @classmethod
    def from_arrays(cls, x, y, truth: Optional[TruthRef] = None) -> "Sample":
        """Validate, sort by abscissa and freeze the arrays.

        Raises:
            ArgumentError: on length mismatch, fewer than two points,
                non-finite values or abscissae outside [0,1]
        """
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ArgumentError(f"x and y differ in length: {x.size} vs {y.size}")
        if x.size < 2:
            raise ArgumentError("a sample needs at least two points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ArgumentError("sample contains non-finite values")
        if x.min() < 0.0 or x.max() > 1.0:
            raise ArgumentError("abscissae must lie in [0,1]")
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        x.flags.writeable = False
        y.flags.writeable = False
        return cls(x=x, y=y, truth=truth)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def has_ties(self) -> bool:
        return bool(np.any(np.diff(self.x) == 0.0))

    def merged(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Merge tied abscissae.

        Returns:
            (knots, ybar, weights): distinct abscissae, the mean response at
            each and the multiplicity as weight. Least squares objectives
            over the merged data differ from the raw ones by a constant.
        """
        knots, inverse, counts = np.unique(self.x, return_inverse=True, return_counts=True)
        ybar = np.bincount(inverse, weights=self.y) / counts
        return knots, ybar, counts.astype(float)
