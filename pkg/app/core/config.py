from typing import Optional
from pydantic import field_validator
from pydantic_settings import BaseSettings

from app.models.tolerance import ToleranceConfig


class Settings(BaseSettings):
    # Project
    PROJECT_NAME: str = "Jordan Spectra"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Spectral preservers of generalized Jordan products: witnesses, reconstruction and recovery"

    # Tolerance policy (relative to the spectrum scale)
    TOL_ZERO: float = 1e-8
    TOL_DISTINCT: float = 1e-6
    TOL_RANK: float = 1e-9
    TOL_MATCH: float = 1e-7

    # Desk-scale caps
    MAX_DIMENSION: int = 64
    MAX_PRODUCT_LENGTH: int = 32
    MAX_RECOVERY_DIMENSION: int = 16

    # Budgets
    DEFAULT_BUDGET: int = 1000
    DEFAULT_TRIALS: int = 100
    RECONSTRUCTION_BUDGET: int = 4000
    VALIDATION_PROBES: int = 20
    TWO_BY_TWO_VALIDATION_PROBES: int = 100
    HYPOTHESIS_TRIALS: int = 50
    MAX_PARAMETER_SCAN: int = 64
    MAX_EPSILON_HALVINGS: int = 60

    # Acceptance thresholds
    VALIDATION_TOLERANCE: float = 1e-6
    TWO_BY_TWO_VALIDATION_TOLERANCE: float = 1e-8
    ROOT_SNAP_TOLERANCE: float = 1e-6
    FRAME_TOLERANCE: float = 1e-6
    MAX_CONDITION: float = 1e6
    GENERICITY_MARGIN: float = 1e-6
    INDEPENDENCE_TOLERANCE: float = 1e-6

    # Campaigns and reports
    CAMPAIGN_WORKERS: int = 1
    REPORT_FORMAT_VERSION: int = 1
    CONSTRUCTION_SEED: int = 20240601

    # Environment
    ENVIRONMENT: str = "development"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        if isinstance(v, str) and v.upper() in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            return v.upper()
        raise ValueError(f"Unknown log level: {v}")

    def tolerance(self, overrides: Optional[dict] = None) -> ToleranceConfig:
        """Tolerance policy built from the configured defaults"""
        config = ToleranceConfig(
            zero=self.TOL_ZERO,
            distinct=self.TOL_DISTINCT,
            rank=self.TOL_RANK,
            match=self.TOL_MATCH,
        )
        if overrides:
            config = ToleranceConfig(**{**config.model_dump(), **overrides})
        return config

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
