"""
Application configuration using Pydantic Settings.
Loads environment variables (prefix HEAVYLS_) and an optional .env file.
"""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Laboratory settings loaded from environment variables.

    Attributes:
        APP_NAME: Application name
        APP_VERSION: Application version, recorded in every manifest
        THREADS: Worker cap for Monte Carlo replications (None = cpu count)
        SOLVER_TOLERANCE: KKT residual tolerance for the shape solvers
        SOLVER_MAX_ITER: Iteration cap for active-set solvers
        DYKSTRA_TOLERANCE: Fixed-point tolerance of the cone/box projection
        DYKSTRA_MAX_ITER: Iteration cap of the cone/box projection
        HOLDER_MAX_N: Largest sample accepted by the all-pairs Hölder solver
        ORACLE_MAX_STEPS: Root-finding steps of the envelope oracle
        ORACLE_TOLERANCE: Tolerance of the oracle root search in log tau (relative step size)
        FIT_BUDGET: Maximal number of fits (len(n_grid) * reps) per experiment
        TRUNCATION_C: Default C in the sup-norm truncation Phi_n = C sqrt(log n)
        MISSPEC_RESOLUTION: Grid size used for the misspecified projection target
        MISSPEC_PAIRS_RESOLUTION: Grid cap of that target for all-pairs Hölder classes (γ < 1)
        DEGRADED_FRACTION: Share of non-converged fits that marks a run degraded
        LOG_LEVEL: Root logging level
    """

    # Application
    APP_NAME: str = "heavyls"
    APP_VERSION: str = "1.0.0"

    # Parallelism
    THREADS: Optional[int] = None

    # Solvers
    SOLVER_TOLERANCE: float = 1e-8
    SOLVER_MAX_ITER: int = 100_000
    DYKSTRA_TOLERANCE: float = 1e-9
    DYKSTRA_MAX_ITER: int = 20_000
    HOLDER_MAX_N: int = 2000

    # Envelope oracle
    ORACLE_MAX_STEPS: int = 200
    ORACLE_TOLERANCE: float = 1e-6

    # Experiments
    FIT_BUDGET: int = 2_000_000
    TRUNCATION_C: float = 4.0
    MISSPEC_RESOLUTION: int = 4096
    MISSPEC_PAIRS_RESOLUTION: int = 256
    DEGRADED_FRACTION: float = 0.01

    # Logging
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HEAVYLS_",
        case_sensitive=True,
        extra="ignore"
    )


# Global settings instance
settings = Settings()
