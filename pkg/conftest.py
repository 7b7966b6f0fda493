"""
Pytest configuration and shared fixtures for testing.
"""
import numpy as np
import pytest

from app.models import Sample, TruthRef
from app.schemas import ExperimentSpec, NoiseSpec, ShapeClass


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; every test gets a fresh stream."""
    return np.random.default_rng(20240501)


@pytest.fixture
def small_sample(rng: np.random.Generator) -> Sample:
    """Twenty noisy observations of x² on a uniform design."""
    x = rng.uniform(size=20)
    y = x * x + 0.1 * rng.standard_normal(20)
    return Sample.from_arrays(x, y, TruthRef("square", NoiseSpec(sigma_fn={"sigma": 0.1})))


@pytest.fixture
def monotone_class() -> ShapeClass:
    return ShapeClass(kind="monotone")


@pytest.fixture
def convex_class() -> ShapeClass:
    return ShapeClass(kind="convex")


@pytest.fixture
def lipschitz_class() -> ShapeClass:
    return ShapeClass(kind="holder", gamma=1.0, lip=1.0)


@pytest.fixture
def tiny_spec() -> ExperimentSpec:
    """A quick isotonic experiment without the exponent fit."""
    return ExperimentSpec.model_validate(
        {
            "class": {"kind": "monotone"},
            "f0": "linear",
            "noise": {"law": "sym_pareto", "q_index": 3},
            "n_grid": [16, 32],
            "reps": 4,
            "fit_rate": False,
            "master_seed": 11,
        }
    )
