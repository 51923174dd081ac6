"""
Preserver Model

The canonical form recovered for a spectral preserver: X ↦ λ·T·X·T⁻¹ or
X ↦ λ·T·Xᵗ·T⁻¹ with λᵐ = 1, or the unitary variant ξ·U·X(ᵗ)·U* on
self-adjoint matrices.
"""

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from app.core.config import settings
from app.core.exceptions import ValidationFailed
from app.services.black_box import BlackBoxMap, SimilarityMap, UnitaryMap
from app.services.linalg_core import condition_number

ROOT_OF_UNITY_TOLERANCE = 1e-8
UNITARY_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class PreserverModel:
    lam: complex
    T: np.ndarray
    transposed: bool
    m: int
    residual: float = 0.0
    unitary: bool = False
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if abs(self.lam ** self.m - 1.0) > ROOT_OF_UNITY_TOLERANCE:
            raise ValidationFailed(f"λ = {self.lam:.6g} is not an {self.m}-th root of unity")
        if condition_number(self.T) >= settings.MAX_CONDITION:
            raise ValidationFailed("recovered T is too ill-conditioned to be a similarity")
        if self.unitary:
            n = self.T.shape[0]
            if np.linalg.norm(self.T.conj().T @ self.T - np.eye(n)) > UNITARY_TOLERANCE:
                raise ValidationFailed("recovered U is not unitary")

    @property
    def n(self) -> int:
        return self.T.shape[0]

    def as_map(self) -> BlackBoxMap:
        if self.unitary:
            return UnitaryMap(self.lam, self.T, self.transposed)
        return SimilarityMap(self.lam, self.T, self.transposed)

    def __call__(self, X) -> np.ndarray:
        return self.as_map()(X)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": [float(self.lam.real), float(self.lam.imag)],
            "transposed": self.transposed,
            "m": self.m,
            "residual": self.residual,
            "unitary": self.unitary,
        }
