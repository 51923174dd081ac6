"""
Tolerance Policy Model

This module defines the numerical tolerance policy shared by every spectral
computation. All thresholds are relative to the scale of the matrix at hand.
"""

from typing import Dict, Any
from pydantic import BaseModel, Field, model_validator


class ToleranceConfig(BaseModel):
    """Relative thresholds for zero detection, distinctness, rank and spectra matching"""

    model_config = {"frozen": True}

    zero: float = Field(default=1e-8, gt=0.0, lt=1.0, description="Eigenvalues below zero·scale collapse to 0")
    distinct: float = Field(default=1e-6, gt=0.0, lt=1.0, description="Eigenvalues closer than distinct·scale are one cluster")
    rank: float = Field(default=1e-9, gt=0.0, lt=1.0, description="Singular values above rank·σ_max count toward rank")
    match: float = Field(default=1e-7, gt=0.0, lt=1.0, description="Matching radius for spectra equality")

    @model_validator(mode="after")
    def check_separation(self) -> "ToleranceConfig":
        if self.distinct < self.match:
            raise ValueError("distinct tolerance must be at least the matching tolerance")
        return self

    def is_zero(self, value: complex, scale: float) -> bool:
        """True when |value| is below the zero threshold at the given scale"""
        return abs(value) <= self.zero * max(scale, 1.0)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for reports"""
        return self.model_dump()
