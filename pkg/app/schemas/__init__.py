"""
Pydantic schemas.
"""
from app.schemas.design import Design, DensitySpec
from app.schemas.envelope import EnvelopeProfile, InterpolationReport
from app.schemas.experiment import (
    ExperimentSpec,
    RateReport,
    RateRow,
    RawRow,
    TailCurve,
    TailReport,
)
from app.schemas.maxineq import ColumnFamily, GrowthReport, MaxIneqConfig, MaxIneqResult
from app.schemas.noise import NoiseMetadata, NoiseSpec, SigmaSpec
from app.schemas.rates import RatePrediction, RegimeInput
from app.schemas.run import RunConfig
from app.schemas.shape import ShapeClass, SolveReport

__all__ = [
    "ColumnFamily",
    "DensitySpec",
    "Design",
    "EnvelopeProfile",
    "ExperimentSpec",
    "GrowthReport",
    "InterpolationReport",
    "MaxIneqConfig",
    "MaxIneqResult",
    "NoiseMetadata",
    "NoiseSpec",
    "RatePrediction",
    "RateReport",
    "RateRow",
    "RawRow",
    "RegimeInput",
    "RunConfig",
    "ShapeClass",
    "SigmaSpec",
    "SolveReport",
    "TailCurve",
    "TailReport",
]
