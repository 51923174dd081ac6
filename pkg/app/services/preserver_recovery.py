"""
Preserver Recovery

Given a black-box map Φ on Mₙ that preserves spectra of BʳABˢ + BˢABʳ
whenever A or B has rank at most one, recover its canonical form:
- Φ(X) = λ·T·X·T⁻¹ or λ·T·Xᵗ·T⁻¹ with λᵐ = 1, m = r + s + 1;
- on self-adjoint matrices, Φ(A) = ξ·U·A·U* or ξ·U·Aᵗ·U* with ξ = ±1, ξᵐ = 1.

Recovery probes Φ on rank-one idempotents, reads off the scalar and the
projective frame T·eᵢ from the images, and validates the assembled model
against Φ on random inputs and on product spectra.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np
import scipy.linalg

from app.core.config import settings
from app.core.exceptions import (
    AmbiguousForm,
    DimensionMismatch,
    FrameInconsistent,
    HypothesisViolated,
    NotPreserver,
    NotRankOnePreserving,
    NotSelfAdjointImage,
    NullSpaceDimension,
    SingularFrame,
    SpectralPreserverError,
    ValidationFailed,
)
from app.models.preserver import PreserverModel
from app.models.tolerance import ToleranceConfig
from app.services.black_box import BlackBoxMap, CallableMap, LinearTableMap, basis_matrix
from app.services.generators import (
    complex_gaussian,
    random_hermitian,
    random_matrix,
    trial_rng,
)
from app.services.jordan_product import check_exponents, two_slot_product
from app.services.linalg_core import (
    DEFAULT_TOLERANCE,
    condition_number,
    matching_distance,
    rank,
    spectra_equal,
    spectrum,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HypothesisReport:
    trials: int
    passes: int
    max_mismatch: float
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.passes == self.trials


def projective_distance(T1, T2) -> float:
    """min over |c| = 1 of ‖c·T₁/‖T₁‖ − T₂/‖T₂‖‖ in Frobenius norm"""
    a = np.asarray(T1, dtype=np.complex128)
    b = np.asarray(T2, dtype=np.complex128)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    overlap = abs(np.vdot(a, b))
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))


def normalize_projective(T: np.ndarray) -> np.ndarray:
    """Unit Frobenius norm with the first significant entry on the positive real axis"""
    T = T / np.linalg.norm(T)
    flat = T.reshape(-1)
    lead = flat[int(np.argmax(np.abs(flat) > settings.FRAME_TOLERANCE * np.max(np.abs(flat))))]
    return T * (abs(lead) / lead)


def snap_root_of_unity(mu: complex, m: int) -> complex:
    """Nearest m-th root of unity to μ, rejecting values farther than the snap tolerance"""
    k = int(np.round(np.angle(mu) * m / (2 * np.pi))) % m
    lam = complex(np.exp(2j * np.pi * k / m))
    if abs(mu - lam) > settings.ROOT_SNAP_TOLERANCE:
        raise NotRankOnePreserving(f"scalar {mu:.6g} is not within tolerance of an {m}-th root of unity")
    return lam


# Hypothesis verification

def _low_rank_factor(rng: np.random.Generator, n: int, trial: int, hermitian: bool) -> np.ndarray:
    if trial % 8 == 0:
        return np.zeros((n, n), dtype=np.complex128)
    x = complex_gaussian(rng, n)
    if hermitian:
        return rng.uniform(-2.0, 2.0) * np.outer(x, x.conj())
    if trial % 2:
        f = complex_gaussian(rng, n)
        # rank-one idempotent
        return np.outer(x, f) / np.dot(f, x)
    return np.outer(x, complex_gaussian(rng, n))


def _product_mismatch(phi: BlackBoxMap, A: np.ndarray, B: np.ndarray, r: int, s: int, tol: ToleranceConfig) -> Tuple[bool, float, Any, Any]:
    before = spectrum(two_slot_product(A, B, r, s), tol)
    after = spectrum(two_slot_product(phi(A), phi(B), r, s), tol)
    return spectra_equal(before, after, tol), matching_distance(before, after), before, after


def verify_hypothesis(
    phi: BlackBoxMap,
    r: int,
    s: int,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    hermitian: bool = False,
) -> HypothesisReport:
    """Check σ(BʳABˢ+BˢABʳ) = σ(Φ(B)ʳΦ(A)Φ(B)ˢ+Φ(B)ˢΦ(A)Φ(B)ʳ) with A or B of rank ≤ 1"""
    check_exponents(r, s, strict=True)
    n = phi.n
    passes, worst, counterexample = 0, 0.0, None
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        low = _low_rank_factor(rng, n, trial, hermitian)
        other = random_hermitian(rng, n) if hermitian else random_matrix(rng, n)
        A, B = (low, other) if (trial // 2) % 2 == 0 else (other, low)
        ok, mismatch, before, after = _product_mismatch(phi, A, B, r, s, tol)
        worst = max(worst, mismatch)
        if ok:
            passes += 1
        elif counterexample is None:
            logger.warning(f"Spectral mismatch {mismatch:.3e} at trial {trial}")
            counterexample = {
                "trial": trial,
                "seed": seed,
                "A": A,
                "B": B,
                "expected": before,
                "observed": after,
            }
    return HypothesisReport(trials=trials, passes=passes, max_mismatch=worst, counterexample=counterexample)


def _require_hypothesis(phi: BlackBoxMap, r: int, s: int, seed: int, tol: ToleranceConfig, hermitian: bool) -> None:
    report = verify_hypothesis(phi, r, s, settings.HYPOTHESIS_TRIALS, seed, tol, hermitian=hermitian)
    if not report.passed:
        trial = report.counterexample["trial"] if report.counterexample else None
        raise HypothesisViolated(
            f"map fails spectral preservation on {report.trials - report.passes} of {report.trials} probes",
            {"trial": trial, "seed": seed, "max_mismatch": report.max_mismatch},
        )


# Linear-map classification

def _map_scalar(psi: BlackBoxMap, m: int) -> complex:
    """Common trace of Ψ over the rank-one idempotent probe family"""
    n = psi.n
    eye = np.eye(n)
    probes = [np.outer(eye[i], eye[i]) for i in range(n)]
    probes += [np.outer(eye[i] + eye[j], eye[i]) for i in range(n) for j in range(n) if i != j]
    traces = np.array([np.trace(psi(P)) for P in probes])
    if np.max(np.abs(traces - traces[0])) > settings.ROOT_SNAP_TOLERANCE:
        raise AmbiguousForm("trace of Ψ is not constant over rank-one idempotents")
    try:
        return snap_root_of_unity(complex(traces[0]), m)
    except NotRankOnePreserving as e:
        raise AmbiguousForm(e.detail)


def _multiplicativity(psi: BlackBoxMap, lam: complex) -> Tuple[float, float]:
    rng = np.random.default_rng(settings.CONSTRUCTION_SEED)
    A, B = random_matrix(rng, psi.n), random_matrix(rng, psi.n)
    pA, pB, pAB = psi(A) / lam, psi(B) / lam, psi(A @ B) / lam
    scale = float(np.linalg.norm(pA) * np.linalg.norm(pB)) or 1.0
    return float(np.linalg.norm(pAB - pA @ pB)) / scale, float(np.linalg.norm(pAB - pB @ pA)) / scale


def _intertwiner(psi: BlackBoxMap, lam: complex, transposed: bool, tol: ToleranceConfig) -> np.ndarray:
    """Unit T solving T·E − Ψ′(E)·T = 0 (E transposed in the anti branch) over the basis of Mₙ"""
    n = psi.n
    eye = np.eye(n)
    blocks = []
    for k in range(n * n):
        E = basis_matrix(n, k)
        image = psi(E) / lam
        E_in = E.T if transposed else E
        # row-major vec(T·X) = (I ⊗ Xᵗ)·vec(T), vec(Y·T) = (Y ⊗ I)·vec(T)
        blocks.append(np.kron(eye, E_in.T) - np.kron(image, eye))
    null = scipy.linalg.null_space(np.vstack(blocks), rcond=tol.rank)
    if null.shape[1] != 1:
        raise NullSpaceDimension(f"intertwiner space has dimension {null.shape[1]}, expected 1")
    return normalize_projective(null[:, 0].reshape(n, n))


def recover_similarity(psi: BlackBoxMap, m: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> PreserverModel:
    """Classify a linear Ψ = λ·(automorphism or anti-automorphism) as λ, T, transposed"""
    lam = _map_scalar(psi, m)
    n = psi.n
    if n == 1:
        return PreserverModel(lam=lam, T=np.eye(1, dtype=np.complex128), transposed=False, m=m)

    forward, backward = _multiplicativity(psi, lam)
    if forward <= settings.VALIDATION_TOLERANCE:
        transposed = False
    elif backward <= settings.VALIDATION_TOLERANCE:
        transposed = True
    else:
        logger.error(f"Neither multiplicative ({forward:.3e}) nor anti-multiplicative ({backward:.3e})")
        raise AmbiguousForm("Ψ/λ is neither multiplicative nor anti-multiplicative")

    T = _intertwiner(psi, lam, transposed, tol)
    if condition_number(T) >= settings.MAX_CONDITION:
        raise SingularFrame("intertwiner is singular at tolerance")
    candidate = CallableMap(n, lambda X: lam * T @ (X.T if transposed else X) @ np.linalg.inv(T))
    residual = max(
        float(np.linalg.norm(psi(basis_matrix(n, k)) - candidate(basis_matrix(n, k)))) for k in range(n * n)
    )
    return PreserverModel(lam=lam, T=T, transposed=transposed, m=m, residual=residual)


# Two-dimensional recovery by vectorization

def _orthogonal_projections(rng: Optional[np.random.Generator]) -> List[np.ndarray]:
    if rng is None:
        s = 1.0 / np.sqrt(2.0)
        vectors = [np.array([1, 0]), np.array([0, 1]), np.array([s, s]), np.array([s, 1j * s])]
    else:
        vectors = [complex_gaussian(rng, 2) for _ in range(4)]
    out = []
    for v in vectors:
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        out.append(np.outer(v, v.conj()))
    return out


def _generic_probe(rng: np.random.Generator, projections: List[np.ndarray], r: int, s: int, tol: ToleranceConfig) -> np.ndarray:
    """B with two distinct eigenvalues in AⱼʳBAⱼˢ + AⱼˢBAⱼʳ for every j when r = 0"""
    for _ in range(settings.DEFAULT_BUDGET):
        B = random_matrix(rng, 2)
        if r >= 1 or all(len(spectrum(two_slot_product(B, A, r, s), tol)) == 2 for A in projections):
            return B
    raise SingularFrame("no generic probe found")


def recover_2x2(
    phi: BlackBoxMap,
    r: int,
    s: int,
    seed: int,
    budget: int = 16,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
) -> Tuple[LinearTableMap, PreserverModel]:
    """
    Linear map Φ̂ with v(Φ̂(B)) = R̂⁻¹·R·v(B) and its canonical form on M₂.

    R has rows v(Aⱼᵗ) so that R·v(B) lists tr(AⱼB); R̂ has rows v((Φ(Aⱼ)^{m−1})ᵗ).
    The probe matrices B₁..B₄ check R·T = R̂·T̂ for T = [v(Bₖ)], T̂ = [v(Φ(Bₖ))].
    """
    check_exponents(r, s, strict=True)
    if phi.n != 2:
        raise DimensionMismatch(f"two-dimensional recovery got dimension {phi.n}")
    m = r + s + 1
    for attempt in range(budget):
        rng = trial_rng(seed, attempt)
        projections = _orthogonal_projections(None if attempt == 0 else rng)
        R = np.vstack([A.T.reshape(-1) for A in projections])
        R_hat = np.vstack([np.linalg.matrix_power(phi(A), m - 1).T.reshape(-1) for A in projections])
        probes = [_generic_probe(rng, projections, r, s, tol) for _ in range(4)]
        T = np.column_stack([B.reshape(-1) for B in probes])
        T_hat = np.column_stack([phi(B).reshape(-1) for B in probes])
        if max(condition_number(R), condition_number(R_hat), condition_number(T), condition_number(T_hat)) < settings.MAX_CONDITION:
            break
        logger.debug(f"Resampling singular frame at attempt {attempt}")
    else:
        raise SingularFrame(f"no nonsingular frame within {budget} attempts")

    frame_residual = float(np.linalg.norm(R @ T - R_hat @ T_hat)) / max(1.0, float(np.linalg.norm(R @ T)))
    if frame_residual > settings.TWO_BY_TWO_VALIDATION_TOLERANCE:
        raise NotPreserver(f"trace identity fails on probes (residual {frame_residual:.3e})")

    table = LinearTableMap(np.linalg.solve(R_hat, R))
    worst = 0.0
    for trial in range(settings.TWO_BY_TWO_VALIDATION_PROBES):
        X = random_matrix(trial_rng(seed + 1, trial), 2)
        target = phi(X)
        worst = max(worst, float(np.linalg.norm(table(X) - target)) / max(1.0, float(np.linalg.norm(target))))
    if worst > settings.TWO_BY_TWO_VALIDATION_TOLERANCE:
        raise NotPreserver(f"reconstructed linear map disagrees with Φ by {worst:.3e}")

    model = recover_similarity(table, m, tol)
    logger.info(f"Two-dimensional recovery: λ={model.lam:.6g}, transposed={model.transposed}")
    return table, model


# Full recovery on Mₙ

def _idempotent_images(phi: BlackBoxMap, m: int, tol: ToleranceConfig) -> Tuple[complex, Dict[Tuple[int, int], np.ndarray]]:
    """Images of eᵢ⊗eᵢ and (eᵢ+eⱼ)⊗eᵢ divided by the common root of unity"""
    n = phi.n
    eye = np.eye(n)
    images: Dict[Tuple[int, int], np.ndarray] = {}
    scalars: List[complex] = []
    for i in range(n):
        for j in range(n):
            x = eye[i] if i == j else eye[i] + eye[j]
            Y = phi(np.outer(x, eye[i]))
            mu = complex(np.trace(Y))
            if abs(mu) < 0.5:
                raise NotRankOnePreserving(f"image of probe ({i}, {j}) has trace {mu:.3e}")
            R = Y / mu
            scale = max(1.0, float(np.linalg.norm(R)))
            if np.linalg.norm(R @ R - R) > settings.VALIDATION_TOLERANCE * scale * scale or rank(R, tol) != 1:
                raise NotRankOnePreserving(f"image of probe ({i}, {j}) is not a multiple of a rank-one idempotent")
            scalars.append(snap_root_of_unity(mu, m))
            images[(i, j)] = R
    lam = scalars[0]
    if any(abs(mu - lam) > settings.ROOT_SNAP_TOLERANCE for mu in scalars):
        raise FrameInconsistent("scalar factor differs between rank-one idempotent images")
    return lam, images


def _range_vector(R: np.ndarray) -> np.ndarray:
    U, _, _ = scipy.linalg.svd(R)
    return U[:, 0]


def _assemble_frame(images: Dict[Tuple[int, int], np.ndarray], n: int) -> np.ndarray:
    """T with columns cᵢ·yᵢ, yᵢ spanning the range of the image of eᵢ⊗eᵢ"""
    ys = [_range_vector(images[(i, i)]) for i in range(n)]
    ratios = np.full((n, n), np.nan, dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            z = _range_vector(images[(i, j)])
            basis = np.column_stack([ys[i], ys[j]])
            w, *_ = np.linalg.lstsq(basis, z, rcond=None)
            if np.linalg.norm(basis @ w - z) > settings.FRAME_TOLERANCE or min(abs(w[0]), abs(w[1])) <= settings.FRAME_TOLERANCE:
                raise FrameInconsistent(f"range of image ({i}, {j}) is not spanned by Teᵢ + Teⱼ")
            ratios[i, j] = w[1] / w[0]

    coeffs = np.ones(n, dtype=np.complex128)
    coeffs[1:] = ratios[0, 1:]
    for i in range(1, n):
        for j in range(n):
            if i != j and abs(ratios[i, j] - coeffs[j] / coeffs[i]) > settings.FRAME_TOLERANCE * max(1.0, abs(coeffs[j] / coeffs[i])):
                raise FrameInconsistent(f"relative scalars disagree on the pair ({i}, {j})")
    return normalize_projective(np.column_stack([c * y for c, y in zip(coeffs, ys)]))


def _validate(phi: BlackBoxMap, model: PreserverModel, r: int, s: int, seed: int, tol: ToleranceConfig, hermitian: bool) -> float:
    """Largest relative deviation from Φ on random inputs and product spectra"""
    worst = 0.0
    n = phi.n
    for trial in range(settings.VALIDATION_PROBES):
        rng = trial_rng(seed + 1, trial)
        X = random_hermitian(rng, n) if hermitian else random_matrix(rng, n)
        target = phi(X)
        worst = max(worst, float(np.linalg.norm(model(X) - target)) / max(1.0, float(np.linalg.norm(target))))
        low = _low_rank_factor(rng, n, trial + 1, hermitian)
        _, mismatch, before, _ = _product_mismatch(phi, X, low, r, s, tol)
        worst = max(worst, mismatch / before.scale)
    return worst


def _similarity_branch(phi: BlackBoxMap, r: int, s: int, seed: int, tol: ToleranceConfig, transposed: bool) -> PreserverModel:
    m = r + s + 1
    source = CallableMap(phi.n, lambda X: phi(X.T)) if transposed else phi
    lam, images = _idempotent_images(source, m, tol)
    T = _assemble_frame(images, phi.n)
    model = PreserverModel(lam=lam, T=T, transposed=transposed, m=m)
    residual = _validate(phi, model, r, s, seed, tol, hermitian=False)
    if residual > settings.VALIDATION_TOLERANCE:
        raise ValidationFailed(f"model deviates from Φ by {residual:.3e}", {"residual": residual})
    return PreserverModel(lam=lam, T=T, transposed=transposed, m=m, residual=residual)


def _recover_scalar(phi: BlackBoxMap, m: int, unitary: bool) -> PreserverModel:
    """Dimension one: Φ(α) = λα with λᵐ = 1"""
    lam = snap_root_of_unity(complex(phi(np.ones((1, 1)))[0, 0]), m)
    if unitary and abs(lam.imag) > settings.ROOT_SNAP_TOLERANCE:
        raise NotSelfAdjointImage(f"self-adjoint scalar map has non-real factor {lam:.6g}")
    probe = 0.5 - 1.5j if not unitary else -1.5
    residual = abs(complex(phi(np.full((1, 1), probe))[0, 0]) - lam * probe) / abs(probe)
    if residual > settings.VALIDATION_TOLERANCE:
        raise ValidationFailed(f"scalar map is not linear (residual {residual:.3e})")
    lam = complex(lam.real) if unitary else lam
    return PreserverModel(lam=lam, T=np.eye(1, dtype=np.complex128), transposed=False, m=m, residual=residual, unitary=unitary)


def recover_full(phi: BlackBoxMap, r: int, s: int, seed: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> PreserverModel:
    """Canonical form λ·T·X(ᵗ)·T⁻¹ of a spectral preserver on Mₙ"""
    check_exponents(r, s, strict=True)
    n = phi.n
    if n > settings.MAX_RECOVERY_DIMENSION:
        raise DimensionMismatch(f"recovery supports n ≤ {settings.MAX_RECOVERY_DIMENSION}, got {n}")
    m = r + s + 1
    logger.info(f"Recovering preserver on M{n} with r={r}, s={s}")
    if n == 1:
        return _recover_scalar(phi, m, unitary=False)
    _require_hypothesis(phi, r, s, seed, tol, hermitian=False)

    failures: Dict[str, SpectralPreserverError] = {}
    for transposed in (False, True):
        branch = "transposed" if transposed else "similarity"
        try:
            model = _similarity_branch(phi, r, s, seed, tol, transposed)
            logger.info(f"Recovered {branch} branch with λ={model.lam:.6g}, residual {model.residual:.3e}")
            return model
        except (FrameInconsistent, ValidationFailed) as e:
            logger.debug(f"{branch} branch rejected: {e.detail}")
            failures[branch] = e
    raise _best_failure(failures)


def _best_failure(failures: Dict[str, SpectralPreserverError]) -> SpectralPreserverError:
    residuals = {k: e.context.get("residual", float("inf")) for k, e in failures.items()}
    best = min(residuals, key=residuals.get)
    error = failures[best]
    logger.error(f"No branch validated; best was {best}: {error.detail}")
    if isinstance(error, ValidationFailed):
        return ValidationFailed(f"no branch validated; best ({best}) residual {residuals[best]:.3e}", {"branch": best, "residual": residuals[best]})
    return FrameInconsistent(f"no consistent frame in either branch: {error.detail}", {"branch": best})


# Self-adjoint recovery

def _projection_image(phi: BlackBoxMap, x: np.ndarray, m: int, tol: ToleranceConfig) -> Tuple[float, np.ndarray]:
    """ξ and unit y with Φ(x⊗x*) = ξ·y⊗y*"""
    Y = phi(np.outer(x, x.conj()))
    scale = max(1.0, float(np.linalg.norm(Y)))
    if np.linalg.norm(Y - Y.conj().T) > settings.VALIDATION_TOLERANCE * scale:
        raise NotSelfAdjointImage("image of a rank-one projection is not self-adjoint")
    Y = (Y + Y.conj().T) / 2.0
    xi = float(np.trace(Y).real)
    if abs(abs(xi) - 1.0) > settings.ROOT_SNAP_TOLERANCE:
        raise NotRankOnePreserving(f"image of a rank-one projection has trace {xi:.6g}")
    xi = 1.0 if xi > 0 else -1.0
    if abs(xi ** m - 1.0) > settings.ROOT_SNAP_TOLERANCE:
        raise NotRankOnePreserving(f"ξ = {xi:+.0f} does not satisfy ξᵐ = 1 for m = {m}")
    w, V = scipy.linalg.eigh(Y / xi)
    if abs(w[-1] - 1.0) > settings.ROOT_SNAP_TOLERANCE or np.max(np.abs(w[:-1]), initial=0.0) > settings.ROOT_SNAP_TOLERANCE:
        raise NotRankOnePreserving("image of a rank-one projection is not a signed rank-one projection")
    return xi, V[:, -1]


def _phase(z: complex) -> complex:
    return z / abs(z)


def recover_selfadjoint(phi: BlackBoxMap, r: int, s: int, seed: int, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> PreserverModel:
    """ξ·U·A(ᵗ)·U* for a spectral preserver of self-adjoint matrices"""
    check_exponents(r, s, strict=True)
    n = phi.n
    if n > settings.MAX_RECOVERY_DIMENSION:
        raise DimensionMismatch(f"recovery supports n ≤ {settings.MAX_RECOVERY_DIMENSION}, got {n}")
    m = r + s + 1
    logger.info(f"Recovering self-adjoint preserver on M{n} with r={r}, s={s}")
    if n == 1:
        return _recover_scalar(phi, m, unitary=True)

    eye = np.eye(n, dtype=np.complex128)
    root = 1.0 / np.sqrt(2.0)
    signs, basis, real_mix, imag_mix = [], [], [], []
    for j in range(n):
        xi, y = _projection_image(phi, eye[j], m, tol)
        signs.append(xi)
        basis.append(y)
    for j in range(1, n):
        xi_r, y_r = _projection_image(phi, root * (eye[0] + eye[j]), m, tol)
        xi_i, y_i = _projection_image(phi, root * (eye[0] + 1j * eye[j]), m, tol)
        signs += [xi_r, xi_i]
        real_mix.append(y_r)
        imag_mix.append(y_i)
    xi = signs[0]
    if any(v != xi for v in signs):
        raise FrameInconsistent("sign of projection images is not constant")

    # Phases of Ueⱼ relative to Ue₁ from the images of (e₁+eⱼ)/√2
    u1 = basis[0]
    columns = [u1]
    for j in range(1, n):
        z = real_mix[j - 1]
        anchor = np.vdot(u1, z)
        if abs(anchor) <= settings.FRAME_TOLERANCE:
            raise FrameInconsistent(f"image of (e₁+e{j + 1})/√2 is orthogonal to Ue₁")
        columns.append(_phase(np.vdot(basis[j], z) / anchor) * basis[j])
    U = np.column_stack(columns)

    # (e₁ + i·eⱼ)/√2 maps to (Ue₁ + i·Ueⱼ)/√2 for unitary maps and (Ue₁ − i·Ueⱼ)/√2 otherwise
    fits = {False: 0.0, True: 0.0}
    for j in range(1, n):
        w = imag_mix[j - 1]
        for transposed, sign in ((False, 1.0), (True, -1.0)):
            fits[transposed] = max(fits[transposed], 1.0 - abs(np.vdot(root * (U[:, 0] + sign * 1j * U[:, j]), w)))
    transposed = fits[True] < fits[False]
    if fits[transposed] > settings.FRAME_TOLERANCE:
        raise FrameInconsistent("imaginary probes match neither the unitary nor the antiunitary frame")

    lead = U.reshape(-1)[int(np.argmax(np.abs(U.reshape(-1)) > settings.FRAME_TOLERANCE))]
    U = U * (abs(lead) / lead)
    model = PreserverModel(lam=complex(xi), T=U, transposed=transposed, m=m, unitary=True)
    residual = _validate(phi, model, r, s, seed, tol, hermitian=True)
    if residual > settings.VALIDATION_TOLERANCE:
        raise ValidationFailed(f"model deviates from Φ by {residual:.3e}", {"residual": residual})
    _require_hypothesis(phi, r, s, seed, tol, hermitian=True)
    logger.info(f"Recovered ξ={xi:+.0f}, transposed={transposed}, residual {residual:.3e}")
    return PreserverModel(lam=complex(xi), T=U, transposed=transposed, m=m, residual=residual, unitary=True)
