"""
Utility helpers.
"""
from app.utils.csv_io import FLOAT_FORMAT, frame_text, read_frame, read_xy

__all__ = ["FLOAT_FORMAT", "frame_text", "read_frame", "read_xy"]
