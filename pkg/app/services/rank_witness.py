"""
Rank-One Witnesses

This module decides whether a matrix has rank one through the spectra of its
two-slot Jordan products. A witness is a matrix B of rank at most three for
which BʳABˢ + BˢABʳ has three distinct nonzero eigenvalues; it exists exactly
when rank(A) ≥ 2, except for square-zero rank-2 matrices when r = 0.

Witnesses are built from explicit similarity reductions of A:
- rank ≥ 3 with r ≥ 1: a 3×3 invertible compression, triangularized, with a
  diagonal B;
- rank 2: detection of the four canonical forms followed by rotation blocks or
  matrix roots of fixed 3×3 matrices;
- rank ≥ 3 with r = 0: a Krylov basis (x, Ax, A²x), an invariant subspace from
  an ordered Schur form, or the scalar case.
A seeded randomized search backs every construction.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import product as cartesian
from typing import Callable, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np
import scipy.linalg

from app.core.config import settings
from app.core.exceptions import CanonicalFormNotReached, PreconditionViolated
from app.models.tolerance import ToleranceConfig
from app.services.generators import complex_gaussian, mixed_probe, trial_rng
from app.services.jordan_product import check_exponents, two_slot_product
from app.services.linalg_core import (
    DEFAULT_TOLERANCE,
    Spectrum,
    as_matrix,
    complement,
    condition_number,
    conjugate,
    embed,
    is_square_zero,
    kernel,
    rank,
    spectrum,
)

logger = logging.getLogger(__name__)


class RankVerdict(str, Enum):
    RANK_ONE = "RankOne"
    NOT_RANK_ONE = "NotRankOne"
    SQUARE_ZERO_RANK_TWO = "SquareZeroRank2"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class WitnessReport:
    """A witness B with its product and clustered product spectrum"""

    witness: np.ndarray
    product: np.ndarray
    spectrum: Spectrum
    distinct_nonzero_count: int
    construction: str


@dataclass(frozen=True, eq=False)
class FuzzReport:
    trials: int
    max_distinct_nonzero: int
    offending_trial: Optional[int] = None
    offending_witness: Optional[np.ndarray] = None

    @property
    def passed(self) -> bool:
        return self.max_distinct_nonzero <= 2


@dataclass(frozen=True, eq=False)
class RankClassification:
    verdict: RankVerdict
    rank: int
    witness: Optional[WitnessReport] = None
    fuzz: Optional[FuzzReport] = None


def make_report(A: np.ndarray, B: np.ndarray, r: int, s: int, tol: ToleranceConfig, tag: str) -> WitnessReport:
    P = two_slot_product(A, B, r, s)
    spec = spectrum(P, tol)
    return WitnessReport(
        witness=B,
        product=P,
        spectrum=spec,
        distinct_nonzero_count=spec.distinct_nonzero_count,
        construction=tag,
    )


def is_certified(report: WitnessReport, tol: ToleranceConfig) -> bool:
    return report.distinct_nonzero_count >= 3 and rank(report.witness, tol) <= 3


def principal_root(C: np.ndarray, k: int) -> np.ndarray:
    """A matrix B with Bᵏ = C for diagonalizable C, principal branch on eigenvalues"""
    if k == 1:
        return np.array(C, dtype=np.complex128)
    w, V = scipy.linalg.eig(C)
    if condition_number(V) > settings.MAX_CONDITION:
        raise CanonicalFormNotReached("matrix root requested for a non-diagonalizable matrix")
    cutoff = 1e-12 * max(1.0, float(np.max(np.abs(w))))
    roots = np.where(np.abs(w) <= cutoff, 0.0, w.astype(np.complex128) ** (1.0 / k))
    return conjugate(V, np.diag(roots))


def rotation(theta: float) -> np.ndarray:
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=np.complex128)


def _parameters() -> range:
    return range(1, settings.MAX_PARAMETER_SCAN + 1)


def _parameter_pairs() -> Iterable[Tuple[int, int]]:
    side = max(2, int(np.sqrt(settings.MAX_PARAMETER_SCAN)))
    return cartesian(range(1, side + 1), repeat=2)


def _scan(
    A: np.ndarray,
    r: int,
    s: int,
    tol: ToleranceConfig,
    tag: str,
    build: Callable[..., np.ndarray],
    params: Iterable,
) -> WitnessReport:
    """First parameter value whose witness certifies three distinct nonzero eigenvalues"""
    for param in params:
        args = param if isinstance(param, tuple) else (param,)
        report = make_report(A, build(*args), r, s, tol, tag)
        if is_certified(report, tol):
            logger.debug(f"Witness {tag} certified at parameter {param}")
            return report
    raise CanonicalFormNotReached(f"parameter scan for {tag} found no admissible value")


def _lift(S: np.ndarray, block: np.ndarray) -> np.ndarray:
    return conjugate(S, embed(block, S.shape[0]))


def _basis(columns: Sequence[np.ndarray]) -> np.ndarray:
    S = np.column_stack(columns)
    if S.shape[0] != S.shape[1] or condition_number(S) > settings.MAX_CONDITION:
        raise CanonicalFormNotReached("similarity reduction produced an ill-conditioned basis")
    return S


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


# Rank ≥ 3, r ≥ 1

def _invertible_compression(A: np.ndarray, tol: ToleranceConfig, tag: str, r: int, s: int) -> WitnessReport:
    U, _, Vh = scipy.linalg.svd(A)
    W = Vh[:3].conj().T
    U3 = U[:, :3]
    for c in (1, -1, 1j, -1j, 2, -2, 2j, -2j, 3, -3):
        Y = W + c * U3
        YW = Y.conj().T @ W
        if condition_number(YW) > settings.MAX_CONDITION:
            continue
        G = np.linalg.solve(YW, Y.conj().T)
        M = G @ A @ W
        if condition_number(M) <= settings.MAX_CONDITION:
            break
    else:
        raise CanonicalFormNotReached("no invertible 3×3 compression found")

    # Triangularize the compression so the product has diagonal 2·a_i·b_i^{r+s}
    _, Q = scipy.linalg.schur(M, output="complex")
    W = W @ Q
    G = Q.conj().T @ G

    def build(b2: int, b3: int) -> np.ndarray:
        return W @ np.diag([1.0, b2, b3]).astype(np.complex128) @ G

    return _scan(A, r, s, tol, tag, build, _parameter_pairs())


# Rank 2: canonical forms (i)–(iv)

def rank_two_form_of(A: np.ndarray, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> str:
    """Which canonical rank-2 form A is similar to"""
    U, sv, Vh = scipy.linalg.svd(A)
    X = U[:, :2] * sv[:2]
    K = Vh[:2] @ X
    norm = float(np.linalg.norm(A, 2))
    if is_square_zero(A, tol):
        return "iv"
    if abs(np.linalg.det(K)) > tol.zero * norm * norm:
        return "i"
    if abs(np.trace(K)) > tol.zero * norm:
        return "ii"
    return "iii"


def _form_i_basis(A: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    U, sv, Vh = scipy.linalg.svd(A)
    X = U[:, :2] * sv[:2]
    K = Vh[:2] @ X
    _, Qk = scipy.linalg.schur(K, output="complex")
    Z = X @ Qk
    N = kernel(A, tol)
    return _basis([_unit(Z[:, 0]), N[:, 0], _unit(Z[:, 1])] + [N[:, j] for j in range(1, N.shape[1])])


def _form_ii_basis(A: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    U, sv, Vh = scipy.linalg.svd(A)
    X = U[:, :2] * sv[:2]
    K = Vh[:2] @ X
    w, V = scipy.linalg.eig(K)
    i = int(np.argmax(np.abs(w)))
    s1 = _unit(X @ V[:, i])
    s2 = _unit(X @ V[:, 1 - i])
    s3 = np.linalg.lstsq(A, s2, rcond=None)[0]
    rest = complement(s2[:, None], within=kernel(A, tol))
    return _basis([s1, s2, s3] + [rest[:, j] for j in range(rest.shape[1])])


def _form_iii_basis(A: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    _, _, Vh = scipy.linalg.svd(A @ A)
    s3 = Vh[0].conj()
    s2 = A @ s3
    s1 = A @ s2
    rest = complement(s1[:, None], within=kernel(A, tol))
    return _basis([s1, s2, s3] + [rest[:, j] for j in range(rest.shape[1])])


def _form_iv_basis(A: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Basis in which A = [[0,1],[0,0]] ⊕ [[1,1],[−1,−1]] ⊕ 0"""
    _, _, Vh = scipy.linalg.svd(A)
    v1, v2 = Vh[0].conj(), Vh[1].conj()
    t1, t3 = A @ v1, A @ v2
    rest = complement(np.column_stack([t1, t3]), within=kernel(A, tol))
    return _basis([t1, v1, v2, v2 - t3] + [rest[:, j] for j in range(rest.shape[1])])


def _rank_two(A: np.ndarray, r: int, s: int, tol: ToleranceConfig) -> WitnessReport:
    form = rank_two_form_of(A, tol)
    family = "sandwich" if r >= 1 else "jordan"
    tag = f"{family}-form-{form}"
    logger.debug(f"Rank-2 matrix detected in canonical form ({form})")

    if form == "i":
        S = _form_i_basis(A, tol)
        theta = np.pi / s if r >= 1 else np.pi / (2 * s + 1)

        def build(d: int) -> np.ndarray:
            block = np.zeros((3, 3), dtype=np.complex128)
            block[:2, :2] = rotation(theta)
            block[2, 2] = d
            return _lift(S, block)

        return _scan(A, r, s, tol, tag, build, _parameters())

    if form == "ii":
        S = _form_ii_basis(A, tol)
        if r >= 1:
            def build(d: int) -> np.ndarray:
                return _lift(S, np.array([[d, 0, 0], [0, 1, 0], [0, 1, 1]], dtype=np.complex128))
        else:
            def build(d: int) -> np.ndarray:
                C = np.array([[0, 1, 0], [1, 0, 0], [0, 2 * d, 2]], dtype=np.complex128)
                return _lift(S, principal_root(C, s))

        return _scan(A, r, s, tol, tag, build, _parameters())

    if form == "iii":
        S = _form_iii_basis(A, tol)
        if r == 0:
            C = np.array([[0, 0, 0], [1, 1, 0], [0, 2, 2]], dtype=np.complex128)
            return _scan(A, r, s, tol, tag, lambda: _lift(S, principal_root(C, s)), [()])
        if s == 2 * r:
            cyclic = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.complex128)
            return _scan(A, r, s, tol, f"{tag}-cyclic", lambda: _lift(S, principal_root(cyclic, r)), [()])
        return _scan(A, r, s, tol, f"{tag}-roots", lambda: _lift(S, _unipotent_root_block(r, s)), [()])

    if r == 0:
        raise PreconditionViolated("square-zero rank-2 matrices admit no witness when r = 0")
    S = _form_iv_basis(A, tol)
    theta = np.pi / (2 * (r + s))

    def build(d: int) -> np.ndarray:
        block = np.zeros((3, 3), dtype=np.complex128)
        block[:2, :2] = rotation(theta)
        block[2, 2] = d
        return _lift(S, block)

    return _scan(A, r, s, tol, tag, build, _parameters())


def _unipotent_root_block(r: int, s: int) -> np.ndarray:
    """B₁ with B₁ˢ = I₃ and B₁ʳ = [[1,0,0],[1,e^{irθ₁},0],[0,2,e^{irθ₂}]], θ₁ = 2π/s, θ₂ = 4π/s"""
    theta = np.array([0.0, 2 * np.pi / s, 4 * np.pi / s])
    L = np.array(
        [[1, 0, 0], [1, np.exp(1j * r * theta[1]), 0], [0, 2, np.exp(1j * r * theta[2])]],
        dtype=np.complex128,
    )
    w, V = scipy.linalg.eig(L)
    targets = np.exp(1j * r * theta)
    roots = np.array([np.exp(1j * theta[int(np.argmin(np.abs(targets - wk)))]) for wk in w])
    return conjugate(V, np.diag(roots))


# Rank ≥ 3, r = 0

def _krylov_vector(A: np.ndarray) -> Optional[np.ndarray]:
    """A unit x with x, Ax, A²x independent, or None when every Krylov space has dimension ≤ 2"""
    rng = np.random.default_rng(settings.CONSTRUCTION_SEED)
    best, best_sigma = None, 0.0
    for _ in range(8):
        x = _unit(complex_gaussian(rng, A.shape[0]))
        K = np.column_stack([x, A @ x, A @ A @ x])
        norms = np.linalg.norm(K, axis=0)
        if np.any(norms == 0.0):
            continue
        sigma = scipy.linalg.svdvals(K / norms)[-1]
        if sigma > best_sigma:
            best, best_sigma = x, sigma
    if best_sigma > settings.INDEPENDENCE_TOLERANCE:
        return best
    return None


def _jordan_full_rank(A: np.ndarray, s: int, tol: ToleranceConfig) -> WitnessReport:
    n = A.shape[0]
    norm = float(np.linalg.norm(A, 2))
    mu = np.trace(A) / n
    if np.linalg.norm(A - mu * np.eye(n)) <= tol.zero * np.linalg.norm(A):
        B = embed(np.diag([1.0, 2.0, 3.0]).astype(np.complex128), n)
        return _scan(A, 0, s, tol, "jordan-scalar", lambda: B, [()])

    Ahat = A / norm
    x = _krylov_vector(Ahat)
    if x is not None:
        K = np.column_stack([x, Ahat @ x, Ahat @ Ahat @ x])
        rest = complement(K)
        S = _basis([K[:, j] for j in range(3)] + [rest[:, j] for j in range(rest.shape[1])])

        def build(t: float) -> np.ndarray:
            C = np.array([[2 * t, 1, 0], [0, t, 2], [0, 0, 0]], dtype=np.complex128)
            return _lift(S, principal_root(C, s))

        ts = [2.0 ** -k for k in range(settings.MAX_PARAMETER_SCAN)]
        return _scan(A, 0, s, tol, "jordan-krylov", build, ts)

    return _invariant_subspace_witness(A, s, tol)


def _invariant_subspace_witness(A: np.ndarray, s: int, tol: ToleranceConfig) -> WitnessReport:
    """Witness supported on a 3-dimensional invariant subspace, nonzero eigenvalues first"""
    n = A.shape[0]
    threshold = settings.INDEPENDENCE_TOLERANCE * float(np.linalg.norm(A, 2))
    T, Z, _ = scipy.linalg.schur(A, output="complex", sort=lambda w: abs(w) > threshold)
    M = T[:3, :3]
    k = rank(M, tol)
    if k == 3:
        def build(b2: int, b3: int) -> np.ndarray:
            return Z @ embed(np.diag([1.0, b2, b3]).astype(np.complex128), n) @ Z.conj().T

        return _scan(A, 0, s, tol, "jordan-invariant-invertible", build, _parameter_pairs())
    if k == 2:
        inner = _rank_two(M, 0, s, tol)
        B = Z @ embed(inner.witness, n) @ Z.conj().T
        return _scan(A, 0, s, tol, f"jordan-invariant-{inner.construction.split('-', 1)[1]}", lambda: B, [()])
    raise CanonicalFormNotReached("invariant subspace compression has rank below 2")


def construct_square_zero_witness(A, s: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> WitnessReport:
    """
    Witness for square-zero A of rank ≥ 3 with r = 0.

    In the basis (x₁,x₂,x₃, Ax₁,Ax₂,Ax₃, complement) the witness satisfies
    Bˢ = [[D,D],[0,0]] ⊕ 0 with D = diag(1,2,3).
    """
    A = as_matrix(A, "A")
    check_exponents(0, s, strict=True)
    if not is_square_zero(A, tol) or rank(A, tol) < 3:
        raise PreconditionViolated("square-zero witness needs A² = 0 and rank(A) ≥ 3")
    _, _, Vh = scipy.linalg.svd(A)
    xs = Vh[:3].conj().T
    frame = np.column_stack([xs, A @ xs])
    rest = complement(frame)
    S = _basis([frame[:, j] for j in range(6)] + [rest[:, j] for j in range(rest.shape[1])])
    D = np.diag([1.0, 2.0, 3.0]).astype(np.complex128)
    C = np.block([[D, D], [np.zeros((3, 3)), np.zeros((3, 3))]])
    B = _lift(S, principal_root(C, s))
    return _scan(A, 0, s, tol, "square-zero-frame", lambda: B, [()])


def construct_witness(A, r: int, s: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> WitnessReport:
    """Deterministic witness of rank ≤ 3 following the case analysis on A"""
    check_exponents(r, s, strict=True)
    A = as_matrix(A, "A")
    if A.shape[0] < 3:
        raise PreconditionViolated("witnesses need dimension at least 3")
    k = rank(A, tol)
    if k <= 1:
        raise PreconditionViolated(f"witness construction needs rank ≥ 2, got rank {k}")
    if r == 0 and is_square_zero(A, tol):
        raise PreconditionViolated("r = 0 requires A² ≠ 0")
    try:
        if r >= 1:
            report = _invertible_compression(A, tol, "sandwich-compression", r, s) if k >= 3 else _rank_two(A, r, s, tol)
        else:
            report = _rank_two(A, r, s, tol) if k == 2 else _jordan_full_rank(A, s, tol)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error(f"Similarity reduction failed: {e}")
        raise CanonicalFormNotReached(f"similarity reduction failed: {e}")
    logger.debug(f"Witness constructed by {report.construction}")
    return report


# Self-adjoint witnesses

def _hermitian_witness(B: np.ndarray) -> np.ndarray:
    return (B + B.conj().T) / 2.0


def _selfadjoint_scan(
    A: np.ndarray, r: int, s: int, tol: ToleranceConfig, tag: str, W: np.ndarray, block: Callable[..., np.ndarray], params
) -> WitnessReport:
    """Scan witnesses W·block·W* for an orthonormal W"""
    return _scan(A, r, s, tol, tag, lambda *p: _hermitian_witness(W @ block(*p) @ W.conj().T), params)


def _diagonal_block(b2: int, b3: int) -> np.ndarray:
    return np.diag([1.0, b2, b3]).astype(np.complex128)


def _projection_block(b: int) -> np.ndarray:
    return np.array([[b, 0, 0], [0, 0.5, 0.5], [0, 0.5, 0.5]], dtype=np.complex128)


def _eigen_frame(A: np.ndarray, tol: ToleranceConfig) -> Tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues and eigenvectors ordered by decreasing modulus, plus the numerical rank"""
    w, U = scipy.linalg.eigh(A)
    order = np.argsort(-np.abs(w), kind="stable")
    w, U = w[order], U[:, order]
    top = float(np.abs(w[0])) if w.size else 0.0
    k = int(np.count_nonzero(np.abs(w) > tol.rank * top)) if top > 0 else 0
    return w, U, k


def _on_invariant_subspace(A: np.ndarray, V: np.ndarray, s: int, tol: ToleranceConfig, tag: str) -> WitnessReport:
    """Diagonal or rank-2 witness inside the A-invariant subspace spanned by orthonormal V"""
    e, E, k = _eigen_frame(V.conj().T @ A @ V, tol)
    W = V @ E
    if k >= 3:
        return _selfadjoint_scan(A, 0, s, tol, tag, W[:, :3], _diagonal_block, _parameter_pairs())
    if k == 2 and W.shape[1] >= 3:
        return _selfadjoint_scan(A, 0, s, tol, tag, W[:, :3], _projection_block, _parameters())
    raise CanonicalFormNotReached(f"invariant subspace for {tag} has rank {k}")


def _lanczos_pair(A: np.ndarray, x1: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """Second Lanczos vector x₂ with a₂ = ‖Ax₁ − a₁x₁‖ and b₃ = ‖Ax₂ − a₂x₁ − b₂x₂‖"""
    a1 = np.vdot(x1, A @ x1).real
    r1 = A @ x1 - a1 * x1
    a2 = float(np.linalg.norm(r1))
    x2 = r1 / a2
    b2 = np.vdot(x2, A @ x2).real
    r2 = A @ x2 - a2 * x1 - b2 * x2
    return x2, a2, float(np.linalg.norm(r2))


def _starting_vector(w: np.ndarray, U: np.ndarray, tol: ToleranceConfig) -> Optional[np.ndarray]:
    """x₁ mixing eigenvectors of distinct eigenvalues, with ⟨Ax₁,x₁⟩ ≠ 0"""
    scale = max(1.0, float(np.max(np.abs(w))))
    picks: List[int] = []
    for i, lam in enumerate(w):
        if all(abs(lam - w[j]) > tol.distinct * scale for j in picks):
            picks.append(i)
        if len(picks) == 3:
            break
    if len(picks) < 2:
        return None
    for weights in ((1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (3.0, 1.0, 2.0), (2.0, 3.0, 1.0), (1.0, 3.0, 2.0)):
        c = np.asarray(weights[: len(picks)])
        c = c / np.linalg.norm(c)
        if abs(np.sum(c * c * w[picks])) > tol.zero * scale:
            return U[:, picks] @ c
    return None


def _selfadjoint_tridiagonal(A: np.ndarray, s: int, w: np.ndarray, U: np.ndarray, tol: ToleranceConfig) -> WitnessReport:
    norm = float(np.linalg.norm(A, 2))
    cutoff = settings.INDEPENDENCE_TOLERANCE * norm
    x1 = _starting_vector(w, U, tol)
    if x1 is None:
        raise CanonicalFormNotReached("no admissible starting vector for tridiagonalization")
    x2, _, b3 = _lanczos_pair(A, x1)
    if b3 > cutoff:
        W = np.column_stack([x1, x2])
        return _scan(A, 0, s, tol, "selfadjoint-lanczos", lambda: _hermitian_witness(W @ W.conj().T), [()])

    # span{x₁, x₂} is invariant; continue in its orthogonal complement
    Q = complement(np.column_stack([x1, x2]))
    _, _, Vh = scipy.linalg.svd(Q.conj().T @ A @ Q)
    x3 = Q @ Vh[0].conj()
    c3 = np.vdot(x3, A @ x3).real
    r3 = A @ x3 - c3 * x3
    c4 = float(np.linalg.norm(r3))
    if c4 <= cutoff:
        V = np.column_stack([x1, x2, x3])
        return _on_invariant_subspace(A, V, s, tol, "selfadjoint-invariant")

    x4 = r3 / c4
    d4 = np.vdot(x4, A @ x4).real
    d5 = float(np.linalg.norm(A @ x4 - c4 * x3 - d4 * x4))
    if d5 > cutoff and abs(c3) > cutoff:
        W = np.column_stack([x3, x4])
        return _scan(A, 0, s, tol, "selfadjoint-lanczos-extended", lambda: _hermitian_witness(W @ W.conj().T), [()])
    V = np.column_stack([x1, x2, x3, x4])
    return _on_invariant_subspace(A, V, s, tol, "selfadjoint-invariant-extended")


def construct_witness_selfadjoint(A, r: int, s: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> WitnessReport:
    """Self-adjoint witness of rank ≤ 3 for self-adjoint A of rank ≥ 2"""
    check_exponents(r, s, strict=True)
    A = as_matrix(A, "A")
    n = A.shape[0]
    if n < 3:
        raise PreconditionViolated("witnesses need dimension at least 3")
    if np.linalg.norm(A - A.conj().T) > tol.zero * max(1.0, float(np.linalg.norm(A))):
        raise PreconditionViolated("A is not self-adjoint")
    A = (A + A.conj().T) / 2.0
    w, U, k = _eigen_frame(A, tol)
    if k <= 1:
        raise PreconditionViolated(f"witness construction needs rank ≥ 2, got rank {k}")

    try:
        if r >= 1:
            if k >= 3:
                return _selfadjoint_scan(A, r, s, tol, "selfadjoint-compression", U[:, :3], _diagonal_block, _parameter_pairs())
            B1 = np.array([[3, 1], [1, 3]], dtype=np.complex128)

            def rank_two_block(d: int) -> np.ndarray:
                block = np.zeros((3, 3), dtype=np.complex128)
                block[0, 0] = d
                block[1:, 1:] = B1
                return block

            return _selfadjoint_scan(A, r, s, tol, "selfadjoint-rank2", U[:, :3], rank_two_block, _parameters())

        if k == 2:
            return _selfadjoint_scan(A, 0, s, tol, "selfadjoint-jordan-rank2", U[:, :3], _projection_block, _parameters())
        if np.max(w) - np.min(w) <= tol.zero * max(1.0, float(np.max(np.abs(w)))):
            B = embed(np.diag([1.0, 2.0, 3.0]).astype(np.complex128), n)
            return _scan(A, 0, s, tol, "selfadjoint-jordan-scalar", lambda: B, [()])
        return _selfadjoint_tridiagonal(A, s, w, U, tol)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        logger.error(f"Self-adjoint reduction failed: {e}")
        raise CanonicalFormNotReached(f"self-adjoint reduction failed: {e}")


# Search and fuzzing

def _random_witness(rng: np.random.Generator, n: int, hermitian: bool) -> np.ndarray:
    k = int(rng.integers(1, 4))
    G = complex_gaussian(rng, (n, k))
    if hermitian:
        return (G * rng.standard_normal(k)) @ G.conj().T
    return G @ complex_gaussian(rng, (k, n))


def witness_search(
    A, r: int, s: int, budget: int, seed: int, tol: ToleranceConfig = DEFAULT_TOLERANCE, hermitian: bool = False
) -> Optional[WitnessReport]:
    """Randomized rank-≤3 search; trial t draws from the stream (seed, t)"""
    A = as_matrix(A, "A")
    for trial in range(budget):
        B = _random_witness(trial_rng(seed, trial), A.shape[0], hermitian)
        report = make_report(A, B, r, s, tol, "search")
        if is_certified(report, tol):
            logger.info(f"Search found a witness at trial {trial}")
            return report
    return None


def rank_one_fuzz_negative(
    A, r: int, s: int, trials: int, seed: int, tol: ToleranceConfig = DEFAULT_TOLERANCE
) -> FuzzReport:
    """Largest distinct-nonzero count over mixed random B; should never exceed 2"""
    check_exponents(r, s)
    A = as_matrix(A, "A")
    n = A.shape[0]
    worst, offending_trial, offending = 0, None, None
    for trial in range(trials):
        _, B = mixed_probe(trial_rng(seed, trial), n, trial)
        count = spectrum(two_slot_product(A, B, r, s), tol).distinct_nonzero_count
        if count > worst:
            worst = count
        if count > 2 and offending_trial is None:
            offending_trial, offending = trial, B
            logger.warning(f"Witness-free class produced {count} distinct nonzero eigenvalues at trial {trial}")
    return FuzzReport(trials=trials, max_distinct_nonzero=worst, offending_trial=offending_trial, offending_witness=offending)


def classify_rank_one(
    A,
    r: int,
    s: int,
    budget: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    selfadjoint: bool = False,
) -> RankClassification:
    """RankOne, NotRankOne with a witness, SquareZeroRank2, or Inconclusive"""
    check_exponents(r, s, strict=True)
    A = as_matrix(A, "A")
    if A.shape[0] < 3:
        raise PreconditionViolated("classification needs dimension at least 3")
    if not np.any(A):
        raise PreconditionViolated("classification needs a nonzero matrix")

    k = rank(A, tol)
    square_zero = is_square_zero(A, tol)
    if k == 1 or (r == 0 and k == 2 and square_zero):
        verdict = RankVerdict.RANK_ONE if k == 1 else RankVerdict.SQUARE_ZERO_RANK_TWO
        fuzz = rank_one_fuzz_negative(A, r, s, budget, seed, tol)
        if not fuzz.passed:
            return RankClassification(RankVerdict.INCONCLUSIVE, k, None, fuzz)
        return RankClassification(verdict, k, None, fuzz)

    try:
        if r == 0 and square_zero:
            report = construct_square_zero_witness(A, s, tol)
        elif selfadjoint:
            report = construct_witness_selfadjoint(A, r, s, tol)
        else:
            report = construct_witness(A, r, s, tol)
        return RankClassification(RankVerdict.NOT_RANK_ONE, k, report)
    except CanonicalFormNotReached as e:
        logger.warning(f"Witness construction failed ({e.detail}); falling back to search")

    report = witness_search(A, r, s, budget, seed, tol, hermitian=selfadjoint)
    if report is None:
        logger.warning(f"No witness within budget {budget} for a matrix of rank {k}")
        return RankClassification(RankVerdict.INCONCLUSIVE, k)
    return RankClassification(RankVerdict.NOT_RANK_ONE, k, report)
