"""
Fuzz Campaigns

Seeded randomized campaigns, one per characterization, each trial drawing its
objects from trial_rng(seed, trial) so any failure can be replayed alone.
Trials run on a thread pool when CAMPAIGN_WORKERS > 1; outcomes are always
reported in trial order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional
import logging
import time

import numpy as np

from app.core.config import settings
from app.core.exceptions import PreconditionViolated, SpectralPreserverError
from app.models.rank_one import RankOneFunctional
from app.models.tolerance import ToleranceConfig
from app.schemas.matrix_schema import MatrixDocument, complex_pair
from app.schemas.report_schema import CampaignReport, FailureRecord, ResultRecord
from app.services.generators import (
    RANK_TWO_FORMS,
    complex_gaussian,
    random_hermitian_of_rank,
    random_idempotent,
    random_matrix,
    random_of_rank,
    random_rank_two_form,
    random_similarity_map,
    random_square_zero,
    random_unitary_map,
    trial_rng,
)
from app.services.idempotent_analysis import (
    OrthogonalityMode,
    find_orthogonality_witness,
    is_generic,
    jordan_eig_class,
    orthogonality_test,
    perturb_to_generic,
)
from app.services.jordan_product import check_exponents
from app.services.linalg_core import DEFAULT_TOLERANCE, Spectrum, matching_distance, spectra_equal, spectrum
from app.services.preserver_recovery import projective_distance, recover_2x2, recover_full, recover_selfadjoint
from app.services.rank_witness import RankVerdict, classify_rank_one
from app.services.reconstruction import MatrixSpectralOracle, recover_matrix

logger = logging.getLogger(__name__)

CAMPAIGN_FUZZ_BUDGET = 20
ORTHOGONALITY_SEARCH_BUDGET = 50
DENSITY_DELTA = 1e-3
RECONSTRUCTION_TOLERANCE = 1e-8
TRACE_TOLERANCE = 1e-10


@dataclass
class TrialOutcome:
    trial: int
    passed: bool
    payload: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""
    inputs: Dict[str, Any] = field(default_factory=dict)
    observed: Any = None
    expected: Any = None


@dataclass(frozen=True)
class TrialContext:
    n: int
    r: int
    s: int
    seed: int
    trial: int
    tol: ToleranceConfig

    @property
    def rng(self) -> np.random.Generator:
        return trial_rng(self.seed, self.trial)

    @property
    def m(self) -> int:
        return self.r + self.s + 1


def matrix_json(M: np.ndarray, tag: Optional[str] = None) -> Dict[str, Any]:
    return MatrixDocument.from_matrix(M, tag).model_dump(exclude_none=True)


def spectrum_json(S: Spectrum) -> List[List[float]]:
    return S.to_pairs()


# Rank-one characterization campaigns

def _rank_case(ctx: TrialContext, selfadjoint: bool = False) -> TrialOutcome:
    """Classify one random matrix and compare against the SVD and nilpotency oracle"""
    rng = ctx.rng
    n = ctx.n
    kind = ctx.trial % 4
    if selfadjoint:
        k = [1, 2, min(3, n), int(rng.integers(1, n + 1))][kind]
        A = random_hermitian_of_rank(rng, n, k)
        label = f"hermitian-rank-{k}"
    elif kind == 0:
        A, label = random_of_rank(rng, n, 1), "rank-1"
    elif kind == 1:
        forms = RANK_TWO_FORMS if ctx.r >= 1 else RANK_TWO_FORMS[:3]
        form = forms[(ctx.trial // 4) % len(forms)]
        if form == "iv" and n < 4:
            form = "i"
        A, label = random_rank_two_form(rng, n, form), f"rank-2-form-{form}"
    elif kind == 2:
        k = int(rng.integers(3, n + 1))
        A, label = random_of_rank(rng, n, k), f"rank-{k}"
    else:
        if ctx.r == 0:
            A, label = complex(rng.standard_normal() + 1j) * np.eye(n), "scalar"
        else:
            A, label = random_matrix(rng, n), "full-rank"

    expected = RankVerdict.RANK_ONE if label in ("rank-1", "hermitian-rank-1") else RankVerdict.NOT_RANK_ONE
    result = classify_rank_one(A, ctx.r, ctx.s, CAMPAIGN_FUZZ_BUDGET, ctx.seed, ctx.tol, selfadjoint=selfadjoint)
    return _rank_outcome(ctx, A, label, expected, result)


def _rank_outcome(ctx: TrialContext, A: np.ndarray, label: str, expected: RankVerdict, result) -> TrialOutcome:
    payload = {"class": label, "verdict": result.verdict.value, "rank": result.rank}
    if result.witness is not None:
        payload["construction"] = result.witness.construction
        payload["distinct_nonzero"] = result.witness.distinct_nonzero_count
    passed = result.verdict == expected
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload=payload,
        detail="" if passed else f"{label}: expected {expected.value}, got {result.verdict.value}",
        inputs={"A": matrix_json(A)},
        observed=result.verdict.value,
        expected=expected.value,
    )


def sandwich_rank_campaign(ctx: TrialContext) -> TrialOutcome:
    if ctx.r < 1:
        raise PreconditionViolated("this campaign needs r ≥ 1")
    return _rank_case(ctx)


def jordan_rank_campaign(ctx: TrialContext) -> TrialOutcome:
    if ctx.r != 0:
        raise PreconditionViolated("this campaign needs r = 0")
    return _rank_case(ctx)


def square_zero_campaign(ctx: TrialContext) -> TrialOutcome:
    """Square-zero matrices with r = 0: rank 2 is witness-free, rank ≥ 3 is not"""
    if ctx.r != 0:
        raise PreconditionViolated("this campaign needs r = 0")
    if ctx.n < 4:
        raise PreconditionViolated("square-zero rank-2 matrices need n ≥ 4")
    k = 3 if (ctx.trial % 2 and ctx.n >= 6) else 2
    A = random_square_zero(ctx.rng, ctx.n, k)
    expected = RankVerdict.SQUARE_ZERO_RANK_TWO if k == 2 else RankVerdict.NOT_RANK_ONE
    result = classify_rank_one(A, ctx.r, ctx.s, CAMPAIGN_FUZZ_BUDGET, ctx.seed, ctx.tol)
    return _rank_outcome(ctx, A, f"square-zero-rank-{k}", expected, result)


def selfadjoint_rank_campaign(ctx: TrialContext) -> TrialOutcome:
    return _rank_case(ctx, selfadjoint=True)


# Idempotent campaigns

def eigenvalue_prediction_campaign(ctx: TrialContext) -> TrialOutcome:
    """Predicted roots against a direct eigensolve of AP + PA"""
    rng = ctx.rng
    A = random_matrix(rng, ctx.n)
    P = random_idempotent(rng, ctx.n)
    cls = jordan_eig_class(A, P, ctx.tol)
    product = A @ P.matrix + P.matrix @ A
    direct = spectrum(product, ctx.tol)
    trace_gap = abs(np.trace(product) - 2 * cls.first_moment)
    passed = spectra_equal(cls.predicted, direct, ctx.tol) and trace_gap <= TRACE_TOLERANCE * direct.scale
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload={"class": cls.eig_class.value, "roots": [complex_pair(z) for z in cls.roots]},
        detail="" if passed else f"prediction off by {matching_distance(cls.predicted, direct):.3e}, trace gap {trace_gap:.3e}",
        inputs={"A": matrix_json(A), "P": matrix_json(P.matrix)},
        observed=spectrum_json(direct),
        expected=spectrum_json(cls.predicted),
    )


def _annihilated(rng: np.random.Generator, M: np.ndarray) -> RankOneFunctional:
    """Idempotent x⊗f with ⟨Mx,f⟩ = 0"""
    n = M.shape[0]
    while True:
        x = complex_gaussian(rng, n)
        Mx = M @ x
        f = complex_gaussian(rng, n)
        f = f - (np.dot(f, Mx) / np.dot(Mx.conj(), Mx)) * Mx.conj()
        if abs(np.dot(f, x)) >= 0.1 * np.linalg.norm(x) * np.linalg.norm(f):
            return RankOneFunctional.idempotent(x, f)


def genericity_campaign(ctx: TrialContext) -> TrialOutcome:
    rng = ctx.rng
    mats = [random_matrix(rng, ctx.n) for _ in range(3)]
    # every other trial starts from an idempotent that is degenerate for A₁
    P = _annihilated(rng, mats[0] @ mats[0]) if ctx.trial % 2 else random_idempotent(rng, ctx.n)
    Q = perturb_to_generic(mats, P, DENSITY_DELTA, ctx.tol, seed=ctx.seed + ctx.trial)
    distance = P.distance(Q)
    generic = all(is_generic(A, Q, settings.GENERICITY_MARGIN) for A in mats)
    passed = distance < DENSITY_DELTA and generic
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload={"distance": distance, "started_degenerate": bool(ctx.trial % 2)},
        detail="" if passed else f"distance {distance:.3e}, generic {generic}",
        inputs={"P": matrix_json(P.matrix)},
    )


def _orthogonal_pair(rng: np.random.Generator, n: int, orthogonal: bool):
    """P = x⊗f, Q = y⊗g with ⟨x,g⟩ = 0, and ⟨y,f⟩ = 0 exactly when orthogonal"""
    x, y = complex_gaussian(rng, n), complex_gaussian(rng, n)

    def annihilate(v, w):
        # vector h with h·w = 0 and h·v = 1
        h = complex_gaussian(rng, n)
        h = h - (np.dot(h, w) / np.dot(w.conj(), w)) * w.conj()
        return h / np.dot(h, v)

    g = annihilate(y, x)
    f = annihilate(x, y) if orthogonal else complex_gaussian(rng, n)
    return RankOneFunctional.idempotent(x, f), RankOneFunctional.idempotent(y, g)


def orthogonality_campaign(ctx: TrialContext) -> TrialOutcome:
    orthogonal = ctx.trial % 2 == 0
    P, Q = _orthogonal_pair(ctx.rng, ctx.n, orthogonal)
    direct = orthogonality_test(P, Q, OrthogonalityMode.DIRECT, tol=ctx.tol)
    if orthogonal:
        witness = orthogonality_test(P, Q, OrthogonalityMode.WITNESS, ORTHOGONALITY_SEARCH_BUDGET, ctx.seed, ctx.tol)
        explicit = True
    else:
        witness = orthogonality_test(P, Q, OrthogonalityMode.WITNESS, 0, ctx.seed, ctx.tol)
        explicit = find_orthogonality_witness(P, Q, ctx.tol) is not None
    passed = direct == witness == orthogonal and explicit
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload={"orthogonal": orthogonal, "direct": direct, "witness": witness},
        detail="" if passed else f"constructed orthogonal={orthogonal}, direct={direct}, witness={witness}",
        inputs={"P": matrix_json(P.matrix), "Q": matrix_json(Q.matrix)},
    )


# Reconstruction and recovery campaigns

def reconstruction_campaign(ctx: TrialContext) -> TrialOutcome:
    rng = ctx.rng
    n = ctx.n
    if ctx.r == 0 and ctx.trial % 5 == 4 and n >= 2:
        A, label = random_square_zero(rng, n, max(1, n // 2)), "square-zero"
    else:
        k = int(rng.integers(1, n + 1))
        A, label = random_of_rank(rng, n, k), f"rank-{k}"
    oracle = MatrixSpectralOracle(A, ctx.r, ctx.s, ctx.tol)
    recovered = recover_matrix(oracle, seed=ctx.seed + ctx.trial, tol=ctx.tol)
    error = float(np.linalg.norm(recovered - A) / max(np.linalg.norm(A), np.finfo(float).tiny))
    passed = error <= RECONSTRUCTION_TOLERANCE
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload={"class": label, "relative_error": error, "queries": oracle.queries},
        detail="" if passed else f"relative error {error:.3e}",
        inputs={"A": matrix_json(A)},
    )


def _model_outcome(ctx: TrialContext, reference, model, kind: str) -> TrialOutcome:
    frame = reference.U if kind == "unitary" else reference.T
    distance = projective_distance(model.T, frame)
    scalar = reference.xi if kind == "unitary" else reference.lam
    passed = (
        abs(model.lam - scalar) <= 1e-12
        and model.transposed == reference.transposed
        and distance <= settings.VALIDATION_TOLERANCE
        and model.residual <= settings.VALIDATION_TOLERANCE
    )
    return TrialOutcome(
        trial=ctx.trial,
        passed=passed,
        payload={"projective_distance": distance, **model.to_dict()},
        detail="" if passed else f"λ {model.lam:.6g} vs {scalar:.6g}, transposed {model.transposed}, distance {distance:.3e}",
        inputs={"T": matrix_json(frame), "lambda": complex_pair(scalar), "transposed": reference.transposed},
    )


def two_by_two_campaign(ctx: TrialContext) -> TrialOutcome:
    reference = random_similarity_map(ctx.rng, 2, ctx.m, transposed=bool(ctx.trial % 2))
    _, model = recover_2x2(reference, ctx.r, ctx.s, ctx.seed + ctx.trial, tol=ctx.tol)
    return _model_outcome(ctx, reference, model, "similarity")


def similarity_recovery_campaign(ctx: TrialContext) -> TrialOutcome:
    reference = random_similarity_map(ctx.rng, ctx.n, ctx.m, transposed=bool(ctx.trial % 2), max_condition=1e3)
    model = recover_full(reference, ctx.r, ctx.s, ctx.seed + ctx.trial, ctx.tol)
    return _model_outcome(ctx, reference, model, "similarity")


def unitary_recovery_campaign(ctx: TrialContext) -> TrialOutcome:
    reference = random_unitary_map(ctx.rng, ctx.n, ctx.m, transposed=bool(ctx.trial % 2))
    model = recover_selfadjoint(reference, ctx.r, ctx.s, ctx.seed + ctx.trial, ctx.tol)
    return _model_outcome(ctx, reference, model, "unitary")


CAMPAIGNS: Dict[str, Callable[[TrialContext], TrialOutcome]] = {
    "2.3": sandwich_rank_campaign,
    "2.4": jordan_rank_campaign,
    "2.5": square_zero_campaign,
    "2.6": reconstruction_campaign,
    "2.8": eigenvalue_prediction_campaign,
    "2.9": genericity_campaign,
    "2.10": orthogonality_campaign,
    "3.4": selfadjoint_rank_campaign,
    "ck": two_by_two_campaign,
    "thm2.2": similarity_recovery_campaign,
    "thm3.1": unitary_recovery_campaign,
}

# Campaigns whose rank-one classification needs s > r
STRICT_CAMPAIGNS = {"2.3", "2.4", "2.5", "3.4", "ck", "thm2.2", "thm3.1"}


def _run_trial(campaign: str, ctx: TrialContext) -> TrialOutcome:
    try:
        return CAMPAIGNS[campaign](ctx)
    except PreconditionViolated:
        raise
    except SpectralPreserverError as e:
        logger.warning(f"Trial {ctx.trial} of campaign {campaign} raised {type(e).__name__}: {e.detail}")
        return TrialOutcome(trial=ctx.trial, passed=False, detail=f"{type(e).__name__}: {e.detail}")


def run_campaign(
    campaign: str,
    n: int,
    r: int,
    s: int,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    workers: Optional[int] = None,
) -> CampaignReport:
    """Run `trials` seeded trials of one campaign and collect a report ordered by trial index"""
    if campaign not in CAMPAIGNS:
        raise PreconditionViolated(f"unknown campaign {campaign!r}; choose from {', '.join(CAMPAIGNS)}")
    check_exponents(r, s, strict=campaign in STRICT_CAMPAIGNS)
    if n < 2:
        raise PreconditionViolated("campaigns need dimension at least 2")
    if campaign in ("2.3", "2.4", "3.4") and n < 3:
        raise PreconditionViolated("rank-one characterization needs dimension at least 3")

    logger.info(f"Starting campaign {campaign}: n={n}, r={r}, s={s}, trials={trials}, seed={seed}")
    start = time.perf_counter()
    contexts = [TrialContext(n=n, r=r, s=s, seed=seed, trial=t, tol=tol) for t in range(trials)]
    workers = workers or settings.CAMPAIGN_WORKERS
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda ctx: _run_trial(campaign, ctx), contexts))
    else:
        outcomes = [_run_trial(campaign, ctx) for ctx in contexts]

    failures = [
        FailureRecord(
            trial=o.trial,
            seed=seed,
            detail=o.detail,
            inputs=o.inputs,
            observed=o.observed,
            expected=o.expected,
        )
        for o in outcomes
        if not o.passed
    ]
    results = [ResultRecord(trial=o.trial, payload=o.payload) for o in outcomes if o.passed]
    report = CampaignReport(
        campaign=campaign,
        n=n,
        r=r,
        s=s,
        seed=seed,
        trials=trials,
        passes=len(results),
        failures=failures,
        results=results,
        tolerance=tol.to_dict(),
        wall_time=time.perf_counter() - start,
    )
    logger.info(f"Campaign {campaign} finished: {report.passes}/{trials} passed in {report.wall_time:.2f}s")
    return report
