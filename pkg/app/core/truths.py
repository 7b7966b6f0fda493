"""
Named regression functions f0 on [0,1].

Each truth declares its breakpoints and the polynomial degree of its
pieces so that L2 distances against it can be integrated exactly;
truths without a degree (the sine) fall back to Gauss quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from app.core.errors import ArgumentError


@dataclass(frozen=True)
class Truth:
    """A reference function with its piecewise-polynomial structure."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    degree: Optional[int] = None
    breakpoints: tuple = ()
    constant: bool = False
    affine: bool = False

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.asarray(self.func(t), dtype=float)


def _zero(t: np.ndarray) -> np.ndarray:
    return np.zeros_like(t)


def _linear(t: np.ndarray) -> np.ndarray:
    return t


def _square(t: np.ndarray) -> np.ndarray:
    return t * t


def _sine(t: np.ndarray) -> np.ndarray:
    return np.sin(2.0 * np.pi * t)


def _abs_centered(t: np.ndarray) -> np.ndarray:
    return np.abs(t - 0.5)


def _step(t: np.ndarray) -> np.ndarray:
    return (t > 0.5).astype(float)


TRUTHS: dict[str, Truth] = {
    "zero": Truth("zero", _zero, degree=0, constant=True, affine=True),
    "linear": Truth("linear", _linear, degree=1, affine=True),
    "square": Truth("square", _square, degree=2),
    "sine": Truth("sine", _sine),
    "abs_centered": Truth("abs_centered", _abs_centered, degree=1, breakpoints=(0.5,)),
    "step": Truth("step", _step, degree=0, breakpoints=(0.5,)),
}


def truth(name: str) -> Truth:
    """Look up a named truth function.

    Raises:
        ArgumentError: if the name is not registered
    """
    try:
        return TRUTHS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown truth function {name!r}; choose from {sorted(TRUTHS)}"
        ) from None
