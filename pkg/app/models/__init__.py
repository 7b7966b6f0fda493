"""
Numeric domain objects: samples, fitted functions and shape cones.
"""
from app.models.cone import ConeConstraint
from app.models.fitted import FittedFn
from app.models.sample import Sample, TruthRef

__all__ = ["ConeConstraint", "FittedFn", "Sample", "TruthRef"]
