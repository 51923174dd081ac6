"""
Black-Box Maps

Deterministic maps Φ: Mₙ → Mₙ consumed by hypothesis verification and
preserver recovery. Canonical forms double as generators for round trips.
"""

from abc import ABC, abstractmethod
from typing import Callable, List, Sequence

import numpy as np
import scipy.linalg

from app.core.exceptions import DimensionMismatch
from app.services.linalg_core import as_matrix


class BlackBoxMap(ABC):
    """A map on n×n complex matrices queried one matrix at a time"""

    def __init__(self, n: int):
        self.n = int(n)

    @abstractmethod
    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        ...

    def __call__(self, X) -> np.ndarray:
        X = as_matrix(X, "map input")
        if X.shape[0] != self.n:
            raise DimensionMismatch(f"map acts on dimension {self.n}, got {X.shape[0]}")
        Y = np.asarray(self._evaluate(X), dtype=np.complex128)
        if Y.shape != (self.n, self.n):
            raise DimensionMismatch(f"map image has shape {Y.shape}, expected {(self.n, self.n)}")
        return Y


class CallableMap(BlackBoxMap):
    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray]):
        super().__init__(n)
        self.fn = fn

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        return self.fn(X)


def basis_matrix(n: int, k: int) -> np.ndarray:
    """k-th standard basis matrix E_ij of Mₙ in row-major order"""
    E = np.zeros((n, n), dtype=np.complex128)
    E[divmod(k, n)] = 1.0
    return E


class LinearTableMap(BlackBoxMap):
    """Linear map given by its n²×n² matrix on row-major vectorizations"""

    def __init__(self, table: np.ndarray):
        table = np.asarray(table, dtype=np.complex128)
        n = int(round(np.sqrt(table.shape[0])))
        if table.shape != (n * n, n * n):
            raise DimensionMismatch(f"map table must be n²×n², got {table.shape}")
        super().__init__(n)
        self.table = table

    @classmethod
    def from_images(cls, images: Sequence[np.ndarray]) -> "LinearTableMap":
        """Table whose k-th column is the image of the k-th basis matrix"""
        n = int(round(np.sqrt(len(images))))
        if n * n != len(images):
            raise DimensionMismatch(f"need n² basis images, got {len(images)}")
        cols = [as_matrix(Y, f"image {k}").reshape(-1) for k, Y in enumerate(images)]
        if any(c.size != n * n for c in cols):
            raise DimensionMismatch("basis images must be n×n")
        return cls(np.column_stack(cols))

    @classmethod
    def from_map(cls, phi: BlackBoxMap) -> "LinearTableMap":
        """Tabulate a map by probing the standard basis (exact for linear maps)"""
        return cls.from_images([phi(basis_matrix(phi.n, k)) for k in range(phi.n * phi.n)])

    def images(self) -> List[np.ndarray]:
        return [self.table[:, k].reshape(self.n, self.n) for k in range(self.n * self.n)]

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        return (self.table @ X.reshape(-1)).reshape(self.n, self.n)


class SimilarityMap(BlackBoxMap):
    """X ↦ λ·T·X·T⁻¹, or λ·T·Xᵗ·T⁻¹ when transposed"""

    def __init__(self, lam: complex, T: np.ndarray, transposed: bool = False):
        T = as_matrix(T, "T")
        super().__init__(T.shape[0])
        self.lam = complex(lam)
        self.T = T
        self.transposed = bool(transposed)
        self._lu = scipy.linalg.lu_factor(T)

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        Y = self.T @ (X.T if self.transposed else X)
        # Y·T⁻¹ = (T⁻ᵗ·Yᵗ)ᵗ
        return self.lam * scipy.linalg.lu_solve(self._lu, Y.T, trans=1).T


class UnitaryMap(BlackBoxMap):
    """A ↦ ξ·U·A·U*, or ξ·U·Aᵗ·U* when transposed"""

    def __init__(self, xi: complex, U: np.ndarray, transposed: bool = False):
        U = as_matrix(U, "U")
        super().__init__(U.shape[0])
        self.xi = complex(xi)
        self.U = U
        self.transposed = bool(transposed)

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        return self.xi * (self.U @ (X.T if self.transposed else X) @ self.U.conj().T)
