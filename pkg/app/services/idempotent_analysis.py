"""
Rank-One Idempotent Analysis

For an idempotent P = x⊗f the matrix AP + PA has rank at most two, and its
nonzero eigenvalues are the roots of t² − 2λt − (⟨A²x,f⟩ − λ²) with
λ = ⟨Ax,f⟩. This module classifies those roots, perturbs P into general
position with respect to up to three matrices, and decides orthogonality of
two idempotents from Jordan products alone.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.exceptions import HypothesisViolated, InsufficientGenericity, PreconditionViolated
from app.models.rank_one import RankOneFunctional
from app.models.tolerance import ToleranceConfig
from app.services.generators import complex_gaussian, random_idempotent, trial_rng
from app.services.linalg_core import (
    DEFAULT_TOLERANCE,
    Spectrum,
    as_matrix,
    is_square_zero,
    rank,
    spectrum,
    spectrum_from_values,
)

logger = logging.getLogger(__name__)


class EigenClass(str, Enum):
    REPEATED_NONZERO = "RepeatedNonzero"
    TWO_DISTINCT_NONZERO = "TwoDistinctNonzero"
    OTHER = "Other"


class OrthogonalityMode(str, Enum):
    DIRECT = "direct"
    WITNESS = "witness"


@dataclass(frozen=True)
class JordanEigClassification:
    """Class of AP + PA with the predicted nonzero eigenvalues"""

    eig_class: EigenClass
    first_moment: complex
    second_moment: complex
    roots: Tuple[complex, complex]
    predicted: Spectrum

    @property
    def predicted_nonzero(self) -> Tuple[complex, ...]:
        return self.predicted.nonzero


@dataclass(frozen=True, eq=False)
class OrthogonalityWitness:
    R: RankOneFunctional
    construction: str


def _moments(A: np.ndarray, P: RankOneFunctional) -> Tuple[complex, complex]:
    """⟨Ax,f⟩ and ⟨A²x,f⟩"""
    Ax = A @ P.x
    return complex(np.dot(P.f, Ax)), complex(np.dot(P.f, A @ Ax))


def _moment_scales(A: np.ndarray, P: RankOneFunctional) -> Tuple[float, float]:
    base = float(np.linalg.norm(P.x) * np.linalg.norm(P.f))
    norm = float(np.linalg.norm(A, 2))
    return max(norm * base, np.finfo(float).tiny), max(norm * norm * base, np.finfo(float).tiny)


def jordan_roots(first: complex, second: complex) -> Tuple[complex, complex]:
    """Roots λ ± √⟨A²x,f⟩ of t² − 2λt − (⟨A²x,f⟩ − λ²)"""
    root = np.sqrt(complex(second))
    return first + root, first - root


def jordan_eig_class(A, P: RankOneFunctional, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> JordanEigClassification:
    """Classify the nonzero spectrum of AP + PA from ⟨Ax,f⟩ and ⟨A²x,f⟩"""
    A = as_matrix(A, "A")
    P.require_idempotent()
    first, second = _moments(A, P)
    scale1, scale2 = _moment_scales(A, P)

    first_zero = abs(first) <= tol.zero * scale1
    second_zero = abs(second) <= tol.zero * scale2
    gap_zero = abs(second - first * first) <= tol.zero * scale2

    if not first_zero and second_zero:
        eig_class = EigenClass.REPEATED_NONZERO
    elif not second_zero and not gap_zero:
        eig_class = EigenClass.TWO_DISTINCT_NONZERO
    else:
        eig_class = EigenClass.OTHER
    roots = jordan_roots(first, second)
    # AP + PA has rank ≤ 2, so the remaining n − 2 eigenvalues vanish
    predicted = spectrum_from_values(list(roots) + [0.0] * (P.n - 2), tol)
    return JordanEigClassification(eig_class, first, second, roots, predicted)


def is_generic(A: np.ndarray, P: RankOneFunctional, margin: float) -> bool:
    """⟨A²x,f⟩ ≠ 0 and ⟨A²x,f⟩ ≠ ⟨Ax,f⟩², both at relative margin"""
    first, second = _moments(A, P)
    _, scale2 = _moment_scales(A, P)
    return abs(second) > margin * scale2 and abs(second - first * first) > margin * scale2


def _directions(A: np.ndarray, P: RankOneFunctional, rng: np.random.Generator) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Perturbation directions (u, h) for x and f, tried in order"""
    zero = np.zeros_like(P.x)
    A2 = A @ A
    directions = []
    A2x = A2 @ P.x
    if np.linalg.norm(A2x) > 0:
        directions.append((zero, A2x.conj()))
    A2f = A2.T @ P.f
    if np.linalg.norm(A2f) > 0:
        directions.append((A2f.conj(), zero))
    if len(directions) == 2:
        directions.append((directions[1][0], directions[0][1]))
    for _ in range(3):
        directions.append((complex_gaussian(rng, P.n), complex_gaussian(rng, P.n)))
    return directions


def _perturbed(P: RankOneFunctional, u: np.ndarray, h: np.ndarray, eps: float) -> Optional[RankOneFunctional]:
    x = P.x + eps * u / max(np.linalg.norm(u), np.finfo(float).tiny) * np.linalg.norm(P.x)
    f = P.f + eps * h / max(np.linalg.norm(h), np.finfo(float).tiny) * np.linalg.norm(P.f)
    pair = complex(np.dot(f, x))
    if abs(pair) <= 0.5:
        return None
    return RankOneFunctional.idempotent(x, f)


def perturb_to_generic(
    As: Sequence,
    P: RankOneFunctional,
    delta: float,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    seed: Optional[int] = None,
) -> RankOneFunctional:
    """
    Idempotent Q with ‖P − Q‖ < δ in general position for every Aᵢ.

    Each matrix is handled in turn with a share δ/k of the distance budget; the
    step size is halved from the share until the predicates of all matrices seen
    so far hold at margin.
    """
    if not 1 <= len(As) <= 3:
        raise PreconditionViolated(f"perturbation handles one to three matrices, got {len(As)}")
    if delta <= 0:
        raise PreconditionViolated(f"δ must be positive, got {delta}")
    P.require_idempotent()
    mats = [as_matrix(A, f"A{i + 1}") for i, A in enumerate(As)]
    for i, A in enumerate(mats):
        if not np.any(A) or is_square_zero(A, tol):
            raise PreconditionViolated(f"A{i + 1}² vanishes; no idempotent is generic for it")

    margin = settings.GENERICITY_MARGIN
    rng = np.random.default_rng(settings.CONSTRUCTION_SEED if seed is None else seed)
    share = delta / len(mats)
    current = P
    for i, A in enumerate(mats):
        seen = mats[: i + 1]
        if all(is_generic(B, current, margin) for B in seen):
            continue
        spent = P.distance(current)
        found = None
        for u, h in _directions(A, current, rng):
            # relative steps move the operator by about ε·‖x‖‖f‖
            eps = share / (2.0 * float(np.linalg.norm(current.x) * np.linalg.norm(current.f)))
            for _ in range(settings.MAX_EPSILON_HALVINGS):
                candidate = _perturbed(current, u, h, eps)
                if (
                    candidate is not None
                    and candidate.distance(current) < share
                    and P.distance(candidate) < min(delta, spent + share)
                    and all(is_generic(B, candidate, margin) for B in seen)
                ):
                    found = candidate
                    break
                eps /= 2.0
            if found is not None:
                break
        if found is None:
            logger.error(f"No generic perturbation within δ={delta:.3e} for A{i + 1}")
            raise InsufficientGenericity(f"could not perturb the idempotent into general position for A{i + 1}")
        logger.debug(f"Perturbed idempotent for A{i + 1} at distance {found.distance(current):.3e}")
        current = found
    return current


# Orthogonality

def _is_rank_one_idempotent(M: np.ndarray, tol: ToleranceConfig) -> bool:
    scale = max(1.0, float(np.linalg.norm(M)))
    if np.linalg.norm(M @ M - M) > tol.zero * scale * scale:
        return False
    return abs(np.trace(M) - 1.0) <= tol.zero * scale and rank(M, tol) == 1


def admits_witness(P: RankOneFunctional, Q: RankOneFunctional, R: RankOneFunctional, tol: ToleranceConfig) -> bool:
    """(PR+RP)/2 and (QR+RQ)/2 are both rank-one idempotents"""
    p, q, r_ = P.matrix, Q.matrix, R.matrix
    return _is_rank_one_idempotent((p @ r_ + r_ @ p) / 2.0, tol) and _is_rank_one_idempotent((q @ r_ + r_ @ q) / 2.0, tol)


def find_orthogonality_witness(
    P: RankOneFunctional, Q: RankOneFunctional, tol: ToleranceConfig = DEFAULT_TOLERANCE
) -> Optional[OrthogonalityWitness]:
    """Explicit R for a non-orthogonal pair P = x⊗f, Q = y⊗g; None when PQ = QP = 0"""
    P.require_idempotent()
    Q.require_idempotent()
    scale = float(np.linalg.norm(P.x) * np.linalg.norm(P.f) * np.linalg.norm(Q.x) * np.linalg.norm(Q.f))
    alpha = complex(np.dot(P.f, Q.x))
    beta = complex(np.dot(Q.f, P.x))
    if abs(alpha) > tol.zero * np.sqrt(scale):
        return OrthogonalityWitness(RankOneFunctional.idempotent(Q.x / alpha, P.f), "range-of-second")
    if abs(beta) > tol.zero * np.sqrt(scale):
        return OrthogonalityWitness(RankOneFunctional.idempotent(P.x, Q.f / beta), "range-of-first")
    return None


def orthogonality_test(
    P: RankOneFunctional,
    Q: RankOneFunctional,
    mode: OrthogonalityMode = OrthogonalityMode.DIRECT,
    budget: int = 1000,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
) -> bool:
    """True when PQ = QP = 0, decided directly or through Jordan-product witnesses"""
    P.require_idempotent()
    Q.require_idempotent()
    p, q = P.matrix, Q.matrix
    if not spectrum(p @ q + q @ p, tol).is_zero:
        raise HypothesisViolated("PQ + QP has a nonzero eigenvalue")

    mode = OrthogonalityMode(mode)
    if mode == OrthogonalityMode.DIRECT:
        scale = max(1.0, float(np.linalg.norm(p) * np.linalg.norm(q)))
        return bool(np.linalg.norm(p @ q) <= tol.zero * scale and np.linalg.norm(q @ p) <= tol.zero * scale)

    witness = find_orthogonality_witness(P, Q, tol)
    if witness is not None and admits_witness(P, Q, witness.R, tol):
        logger.debug(f"Orthogonality refuted by explicit witness ({witness.construction})")
        return False
    for trial in range(budget):
        R = random_idempotent(trial_rng(seed, trial), P.n)
        if admits_witness(P, Q, R, tol):
            logger.info(f"Orthogonality refuted by random witness at trial {trial}")
            return False
    return True
