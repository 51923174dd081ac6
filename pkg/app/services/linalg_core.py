"""
Linear Algebra Core

This module holds the dense complex matrix kernels every other service is
built on: validated matrix construction, clustered spectra, numerical rank,
tolerance-aware spectra comparison and the outer product x⊗f.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple
import logging

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from app.core.config import settings
from app.core.exceptions import DegenerateInput, DimensionMismatch, NonConvergence
from app.models.tolerance import ToleranceConfig

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class Spectrum:
    """Clustered eigenvalue representatives of a matrix, treated as a set"""

    values: Tuple[complex, ...]
    scale: float
    multiplicities: Tuple[int, ...] = field(default=(), compare=False)
    trace_residual: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, value: complex) -> bool:
        return any(v == value for v in self.values)

    @property
    def nonzero(self) -> Tuple[complex, ...]:
        """Representatives other than the collapsed zero"""
        return tuple(v for v in self.values if v != 0)

    @property
    def distinct_nonzero_count(self) -> int:
        return len(self.nonzero)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def to_pairs(self) -> List[List[float]]:
        return [[float(v.real), float(v.imag)] for v in self.values]


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate and convert input to a square finite complex128 array"""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    n = arr.shape[0]
    if n < 1 or n > settings.MAX_DIMENSION:
        raise DimensionMismatch(f"{name} dimension {n} outside 1..{settings.MAX_DIMENSION}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInput(f"{name} has non-finite entries")
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DegenerateInput(f"{name} must be a finite nonempty vector")
    return arr


def pairing(x: np.ndarray, f: np.ndarray) -> complex:
    """Bilinear pairing ⟨x, f⟩ = Σ f_j x_j (no conjugation)"""
    return complex(np.dot(f, x))


def outer(x, f) -> np.ndarray:
    """The rank-one operator x⊗f with entries x_i·f_j"""
    x = as_vector(x, "x")
    f = as_vector(f, "f")
    if x.shape != f.shape:
        raise DimensionMismatch(f"x has length {x.size} but f has length {f.size}")
    tiny = np.finfo(float).tiny
    if np.linalg.norm(x) <= tiny or np.linalg.norm(f) <= tiny:
        raise DegenerateInput("outer product of a zero vector")
    return np.outer(x, f)


def _singular_values(M: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.svdvals(M, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error(f"Singular value decomposition failed: {e}")
        raise NonConvergence(f"SVD did not converge: {e}")


def rank(M, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> int:
    """Number of singular values above tol.rank times the largest one"""
    M = as_matrix(M)
    s = _singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank * s[0]))


def is_square_zero(A: np.ndarray, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> bool:
    """True when A² vanishes relative to ‖A‖²"""
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return True
    return bool(np.linalg.norm(A @ A) <= tol.zero * norm * norm)


def _deflate_nilpotent(M: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """
    Strip the nilpotent part of M by repeated rank-revealing compression.

    For a rank factorization M = XY the core YX has exactly the nonzero
    eigenvalues of M with multiplicities; repeating until the core is
    nonsingular leaves only the invertible part.
    """
    core = M
    while core.shape[0] > 0:
        try:
            U, s, Vh = scipy.linalg.svd(core, check_finite=False)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            logger.error(f"Deflation SVD failed: {e}")
            raise NonConvergence(f"SVD did not converge: {e}")
        if s[0] == 0.0:
            return core[:0, :0]
        k = int(np.count_nonzero(s > tol.rank * s[0]))
        if k == core.shape[0]:
            break
        core = (Vh[:k] @ U[:, :k]) * s[:k]
    return core


def _cluster(values: np.ndarray, radius: float, zero_radius: float) -> Tuple[List[complex], List[int]]:
    reps = [complex(v) for v in values]
    mult = [1] * len(reps)
    while len(reps) > 1:
        arr = np.asarray(reps)
        dist = np.abs(arr[:, None] - arr[None, :])
        np.fill_diagonal(dist, np.inf)
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[i, j] > radius:
            break
        i, j = min(i, j), max(i, j)
        if reps[i] == 0 or reps[j] == 0:
            merged = 0j
        else:
            merged = (reps[i] * mult[i] + reps[j] * mult[j]) / (mult[i] + mult[j])
            if abs(merged) <= zero_radius:
                merged = 0j
        reps[i] = merged
        mult[i] += mult[j]
        del reps[j]
        del mult[j]
    return reps, mult


def spectrum(M, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> Spectrum:
    """Eigenvalues of M clustered into a multiplicity-free set"""
    M = as_matrix(M)
    n = M.shape[0]
    core = _deflate_nilpotent(M, tol)
    try:
        eig = scipy.linalg.eigvals(core, check_finite=False) if core.size else np.zeros(0, dtype=complex)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error(f"Eigenvalue computation failed: {e}")
        raise NonConvergence(f"eigensolver did not converge: {e}")

    values = np.concatenate([eig, np.zeros(n - core.shape[0], dtype=complex)])
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    zero_radius = tol.zero * scale
    values[np.abs(values) <= zero_radius] = 0.0

    reps, mult = _cluster(values, tol.distinct * scale, zero_radius)
    trace_residual = abs(sum(r * k for r, k in zip(reps, mult)) - np.trace(M))
    if trace_residual > max(1e-8, n * tol.zero) * scale:
        logger.warning(f"Clustered spectrum drifts from the trace by {trace_residual:.3e} (scale {scale:.3e})")

    order = sorted(range(len(reps)), key=lambda k: (reps[k].real, reps[k].imag))
    return Spectrum(
        values=tuple(reps[k] for k in order),
        scale=scale,
        multiplicities=tuple(mult[k] for k in order),
        trace_residual=float(trace_residual),
    )


def spectrum_from_values(values: Iterable[complex], tol: ToleranceConfig = DEFAULT_TOLERANCE) -> Spectrum:
    """Build a Spectrum from explicit eigenvalues with the same clustering policy"""
    values = np.asarray(list(values), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    zero_radius = tol.zero * scale
    values[np.abs(values) <= zero_radius] = 0.0
    reps, mult = _cluster(values, tol.distinct * scale, zero_radius)
    order = sorted(range(len(reps)), key=lambda k: (reps[k].real, reps[k].imag))
    return Spectrum(
        values=tuple(reps[k] for k in order),
        scale=scale,
        multiplicities=tuple(mult[k] for k in order),
    )


def matching_distance(S1: Spectrum, S2: Spectrum) -> float:
    """Largest pair distance of the best matching, inf on cardinality mismatch"""
    if len(S1) != len(S2):
        return float("inf")
    if len(S1) == 0:
        return 0.0
    a = np.asarray(S1.values)
    b = np.asarray(S2.values)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def spectra_equal(S1: Spectrum, S2: Spectrum, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> bool:
    """Set equality up to a perfect matching within tol.match·scale"""
    radius = tol.match * max(S1.scale, S2.scale)
    return matching_distance(S1, S2) <= radius


def kernel(M: np.ndarray, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the numerical null space of M"""
    return scipy.linalg.null_space(M, rcond=tol.rank)


def complement(V: np.ndarray, within: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Orthonormal basis of the orthogonal complement of span(V).

    With `within` given, the complement is taken inside span(within).
    """
    if within is None:
        return scipy.linalg.null_space(V.conj().T)
    coords = scipy.linalg.null_space(V.conj().T @ within)
    return scipy.linalg.orth(within @ coords) if coords.size else within[:, :0]


def condition_number(M: np.ndarray) -> float:
    s = _singular_values(M)
    if s.size == 0 or s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def conjugate(S: np.ndarray, F: np.ndarray) -> np.ndarray:
    """S·F·S⁻¹"""
    return np.linalg.solve(S.T, (S @ F).T).T


def embed(block: np.ndarray, n: int) -> np.ndarray:
    """block ⊕ 0 in dimension n"""
    k = block.shape[0]
    if k > n:
        raise DimensionMismatch(f"block of size {k} does not fit dimension {n}")
    out = np.zeros((n, n), dtype=np.complex128)
    out[:k, :k] = block
    return out
