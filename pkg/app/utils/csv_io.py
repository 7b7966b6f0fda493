"""
Lossless CSV helpers.

Reals are written with 17 significant digits and read back with pandas'
round-trip float parser, so a written frame re-parses to the same bits.
"""
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from app.core.errors import ArgumentError

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def frame_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def read_frame(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def read_xy(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """Read the two-column (x, y) input of `fit`.

    Raises:
        ArgumentError: missing file, missing x/y columns or non-numeric cells
    """
    try:
        frame = read_frame(path)
    except FileNotFoundError:
        raise ArgumentError(f"input file not found: {path}") from None
    missing = {"x", "y"} - set(frame.columns)
    if missing:
        raise ArgumentError(f"input CSV lacks column(s) {sorted(missing)}; header must be x,y")
    try:
        x = frame["x"].to_numpy(dtype=float)
        y = frame["y"].to_numpy(dtype=float)
    except ValueError as exc:
        raise ArgumentError(f"non-numeric value in {path}: {exc}") from None
    return x, y
