"""
Service layer: one module per functional area.
"""
from app.services import (
    envelope_lab,
    experiment_engine,
    geometry,
    interpolation,
    maxineq_lab,
    noise_lab,
    projections,
    rate_theory,
    reports,
    shape_solvers,
)

__all__ = [
    "envelope_lab",
    "experiment_engine",
    "geometry",
    "interpolation",
    "maxineq_lab",
    "noise_lab",
    "projections",
    "rate_theory",
    "reports",
    "shape_solvers",
]
