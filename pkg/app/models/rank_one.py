"""
Rank-One Functional Model

A pair (x, f) standing for the operator x⊗f, with the bilinear pairing
⟨x, f⟩ = Σ f_j x_j cached. Idempotent exactly when the pairing is 1.
"""

from dataclasses import dataclass

import numpy as np

from app.core.exceptions import DegenerateInput, DimensionMismatch, NotIdempotent

IDEMPOTENT_TOLERANCE = 1e-10


def _frozen(v: np.ndarray) -> np.ndarray:
    v = np.array(v, dtype=np.complex128).ravel()
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class RankOneFunctional:
    """The operator x⊗f together with ⟨x, f⟩"""

    x: np.ndarray
    f: np.ndarray
    pairing: complex

    @classmethod
    def create(cls, x, f) -> "RankOneFunctional":
        x = _frozen(x)
        f = _frozen(f)
        if x.shape != f.shape:
            raise DimensionMismatch(f"x has length {x.size} but f has length {f.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
            raise DegenerateInput("rank-one functional with non-finite entries")
        if np.linalg.norm(x) == 0.0 or np.linalg.norm(f) == 0.0:
            raise DegenerateInput("rank-one functional needs nonzero x and f")
        return cls(x=x, f=f, pairing=complex(np.dot(f, x)))

    @classmethod
    def idempotent(cls, x, f) -> "RankOneFunctional":
        """Rescale f so that ⟨x, f⟩ = 1"""
        raw = cls.create(x, f)
        if abs(raw.pairing) <= 1e-12 * np.linalg.norm(raw.x) * np.linalg.norm(raw.f):
            raise DegenerateInput("⟨x, f⟩ vanishes; cannot normalize to an idempotent")
        return cls.create(raw.x, raw.f / raw.pairing)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def is_idempotent(self) -> bool:
        return abs(self.pairing - 1.0) <= IDEMPOTENT_TOLERANCE

    def require_idempotent(self) -> "RankOneFunctional":
        if not self.is_idempotent:
            raise NotIdempotent(f"⟨x, f⟩ = {self.pairing:.6g}, expected 1")
        return self

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.x, self.f)

    def apply_form(self, A: np.ndarray) -> complex:
        """⟨Ax, f⟩"""
        return complex(np.dot(self.f, A @ self.x))

    def u(self, A: np.ndarray) -> np.ndarray:
        """Ax − ⟨Ax,f⟩x"""
        return A @ self.x - self.apply_form(A) * self.x

    def g(self, A: np.ndarray) -> np.ndarray:
        """Aᵗf − ⟨Ax,f⟩f"""
        return A.T @ self.f - self.apply_form(A) * self.f

    def distance(self, other: "RankOneFunctional") -> float:
        """Operator 2-norm of the difference of the two operators"""
        return float(np.linalg.norm(self.matrix - other.matrix, ord=2))
