import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from app.core.exceptions import BadExponents, PreconditionViolated
from app.services.generators import (
    RANK_TWO_FORMS,
    random_hermitian_of_rank,
    random_matrix,
    random_of_rank,
    random_rank_two_form,
    random_square_zero,
    random_unitary,
    rank_two_form,
    trial_rng,
)
from app.services.linalg_core import embed, matching_distance, rank, spectrum_from_values
from app.services.rank_witness import (
    RankVerdict,
    classify_rank_one,
    construct_square_zero_witness,
    construct_witness,
    construct_witness_selfadjoint,
    principal_root,
    rank_one_fuzz_negative,
    rank_two_form_of,
    witness_search,
)

BUDGET = 40


def assert_certified(report):
    assert report.distinct_nonzero_count >= 3
    assert rank(report.witness) <= 3


def assert_nonzero_spectrum(report, expected, atol=1e-8):
    distance = matching_distance(spectrum_from_values(report.spectrum.nonzero), spectrum_from_values(expected))
    assert distance <= atol * max(1.0, max(abs(z) for z in expected))


# Explicit constructions

def test_cyclic_witness_gives_cube_roots_of_two():
    A = rank_two_form("iii")
    report = construct_witness(A, 1, 2)
    assert_certified(report)
    roots = [2 ** (1 / 3) * np.exp(2j * np.pi * k / 3) for k in range(3)]
    assert_nonzero_spectrum(report, roots)


def test_form_ii_sandwich_witness_spectrum():
    report = construct_witness(embed(rank_two_form("ii", a=1.0), 3), 1, 2)
    assert_certified(report)
    assert_nonzero_spectrum(report, [2.0, 3 + 2 * np.sqrt(2), 3 - 2 * np.sqrt(2)])


def test_form_ii_jordan_witness_spectrum():
    report = construct_witness(embed(rank_two_form("ii", a=1.0), 3), 0, 1)
    assert_certified(report)
    assert_nonzero_spectrum(report, [2.0, 1 + np.sqrt(2), 1 - np.sqrt(2)])


def test_scalar_matrix_uses_diagonal_witness():
    report = construct_witness(np.eye(3), 0, 1)
    assert_certified(report)
    assert_nonzero_spectrum(report, [2.0, 4.0, 6.0])


@pytest.mark.parametrize("r, s", [(1, 2), (1, 3), (2, 3)])
def test_full_rank_compression_witness(r, s):
    A = random_matrix(trial_rng(11, r * 10 + s), 5)
    assert_certified(construct_witness(A, r, s))


@pytest.mark.parametrize("s", [1, 2, 3])
def test_full_rank_jordan_witness(s):
    A = random_matrix(trial_rng(12, s), 4)
    report = construct_witness(A, 0, s)
    assert_certified(report)
    assert report.construction != "search"


@pytest.mark.parametrize("form", RANK_TWO_FORMS)
def test_rank_two_form_detection(form):
    A = random_rank_two_form(trial_rng(13, RANK_TWO_FORMS.index(form)), 5, form)
    assert rank_two_form_of(A) == form


@pytest.mark.parametrize("s", [1, 2, 3])
def test_square_zero_rank_three_witness(s):
    A = random_square_zero(trial_rng(14, s), 6, 3)
    report = construct_square_zero_witness(A, s)
    assert_certified(report)
    for target in (1.0, 2.0, 3.0):
        assert min(abs(z - target) for z in report.spectrum.nonzero) <= 1e-5


def test_square_zero_witness_needs_rank_three():
    with pytest.raises(PreconditionViolated):
        construct_square_zero_witness(random_square_zero(trial_rng(15, 0), 4, 2), 1)


def test_construct_witness_preconditions():
    with pytest.raises(PreconditionViolated):
        construct_witness(random_of_rank(trial_rng(16, 0), 4, 1), 1, 2)
    with pytest.raises(PreconditionViolated):
        construct_witness(random_square_zero(trial_rng(16, 1), 6, 3), 0, 1)
    with pytest.raises(BadExponents):
        construct_witness(np.eye(3), 1, 1)


def test_principal_root_inverts_power():
    C = np.diag([1.0, 4.0, -9.0]) + np.diag([1.0, 1.0], k=1)
    B = principal_root(C, 3)
    assert_allclose(np.linalg.matrix_power(B, 3), C, atol=1e-10)


# Classification

@pytest.mark.parametrize("r, s", [(1, 2), (0, 1), (0, 2)])
def test_rank_one_matrices_are_witness_free(r, s):
    A = random_of_rank(trial_rng(20, r + s), 5, 1)
    result = classify_rank_one(A, r, s, budget=BUDGET, seed=3)
    assert result.verdict == RankVerdict.RANK_ONE
    assert result.rank == 1
    assert result.fuzz.passed
    assert result.fuzz.max_distinct_nonzero <= 2


@pytest.mark.parametrize("s", [1, 2])
def test_square_zero_rank_two_is_exceptional_for_jordan_products(s):
    A = random_square_zero(trial_rng(21, s), 4, 2)
    result = classify_rank_one(A, 0, s, budget=BUDGET, seed=5)
    assert result.verdict == RankVerdict.SQUARE_ZERO_RANK_TWO
    assert result.fuzz.max_distinct_nonzero <= 2


def test_square_zero_rank_two_has_witness_when_r_positive():
    A = random_square_zero(trial_rng(22, 0), 4, 2)
    result = classify_rank_one(A, 1, 2, budget=BUDGET, seed=5)
    assert result.verdict == RankVerdict.NOT_RANK_ONE
    assert_certified(result.witness)


@pytest.mark.parametrize("form", RANK_TWO_FORMS)
@pytest.mark.parametrize("r, s", [(1, 2), (0, 1)])
def test_rank_two_forms(form, r, s):
    A = random_rank_two_form(trial_rng(23, RANK_TWO_FORMS.index(form)), 4, form)
    result = classify_rank_one(A, r, s, budget=BUDGET, seed=7)
    if r == 0 and form == "iv":
        assert result.verdict == RankVerdict.SQUARE_ZERO_RANK_TWO
    else:
        assert result.verdict == RankVerdict.NOT_RANK_ONE
        assert_certified(result.witness)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("r, s", [(1, 2), (0, 1), (0, 2)])
def test_random_rank_at_least_two(k, r, s):
    A = random_of_rank(trial_rng(24, k), 4, k)
    result = classify_rank_one(A, r, s, budget=BUDGET, seed=9)
    assert result.verdict == RankVerdict.NOT_RANK_ONE
    assert result.rank == k
    assert_certified(result.witness)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("r, s", [(1, 2), (0, 1)])
def test_selfadjoint_witnesses_are_selfadjoint(k, r, s):
    A = random_hermitian_of_rank(trial_rng(25, k), 4, k)
    result = classify_rank_one(A, r, s, budget=200, seed=9, selfadjoint=True)
    assert result.verdict == RankVerdict.NOT_RANK_ONE
    B = result.witness.witness
    assert np.linalg.norm(B - B.conj().T) <= 1e-10 * max(1.0, float(np.linalg.norm(B)))
    assert_certified(result.witness)


def test_selfadjoint_rank_one_is_witness_free():
    A = random_hermitian_of_rank(trial_rng(26, 0), 4, 1)
    result = classify_rank_one(A, 1, 2, budget=BUDGET, seed=1, selfadjoint=True)
    assert result.verdict == RankVerdict.RANK_ONE


def test_classification_preconditions():
    with pytest.raises(PreconditionViolated):
        classify_rank_one(np.eye(2), 1, 2, budget=BUDGET, seed=0)
    with pytest.raises(PreconditionViolated):
        classify_rank_one(np.zeros((3, 3)), 1, 2, budget=BUDGET, seed=0)
    with pytest.raises(BadExponents):
        classify_rank_one(np.eye(3), 2, 2, budget=BUDGET, seed=0)


def test_witness_search_is_replayable():
    A = random_matrix(trial_rng(27, 0), 4)
    first = witness_search(A, 1, 2, budget=BUDGET, seed=42)
    second = witness_search(A, 1, 2, budget=BUDGET, seed=42)
    assert first is not None
    assert np.array_equal(first.witness, second.witness)


def test_fuzz_counts_distinct_values_for_full_rank():
    A = random_matrix(trial_rng(28, 0), 4)
    report = rank_one_fuzz_negative(A, 1, 2, trials=12, seed=0)
    # full-rank A is not witness-free, so random B exposes three or more values
    assert report.max_distinct_nonzero >= 3
    assert not report.passed
    assert report.offending_trial is not None


@pytest.mark.parametrize("s", [1, 2])
def test_nilpotent_form_jordan_witness_spectrum(s):
    report = construct_witness(rank_two_form("iii"), 0, s)
    assert_certified(report)
    assert_nonzero_spectrum(report, [1.0, 2.0, 3.0])


def test_selfadjoint_scalar_witness():
    report = construct_witness_selfadjoint(2.0 * np.eye(3), 0, 1)
    assert_certified(report)
    assert_nonzero_spectrum(report, [4.0, 8.0, 12.0])


def test_selfadjoint_rank_two_witness_is_hermitian():
    A = np.diag([1.0, -2.0, 0.0, 0.0])
    report = construct_witness_selfadjoint(A, 1, 2)
    assert_certified(report)
    B = report.witness
    assert np.linalg.norm(B - B.conj().T) <= 1e-12 * max(1.0, float(np.linalg.norm(B)))


@pytest.mark.parametrize("r, s", [(1, 2), (1, 3), (2, 3), (2, 5)])
def test_selfadjoint_rank_two_mixed_signs(r, s):
    for trial in range(5):
        rng = trial_rng(19, 10 * r + s + 100 * trial)
        U = random_unitary(rng, 5)[:, :2]
        lam = np.array([rng.uniform(0.5, 2.0), -rng.uniform(0.5, 2.0)])
        A = (U * lam) @ U.conj().T
        report = construct_witness_selfadjoint(A, r, s)
        assert_certified(report)

        w, V = np.linalg.eigh(A)
        order = np.argsort(-np.abs(w))
        a1, a2 = w[order[0]], w[order[1]]
        values = np.linalg.eigvalsh(report.product)
        nonzero = values[np.abs(values) > 1e-8 * np.abs(values).max()]
        assert len(nonzero) == 3
        assert np.count_nonzero(nonzero < 0) == (2 if a1 < 0 else 1)

        # the block of the product away from the top eigenvector of A
        v1 = V[:, order[0]]
        R = scipy.linalg.orth(report.witness)
        Q = R @ scipy.linalg.null_space(v1.conj()[None, :] @ R)
        block = Q.conj().T @ report.product @ Q
        expected = -(a2**2) * 4.0 ** (r + s - 1) * (2.0**s - 2.0**r) ** 2
        det = np.linalg.det(block)
        assert det.real < 0
        assert abs(det - expected) <= 1e-8 * abs(expected)


def test_selfadjoint_real_symmetric_rank_three():
    rng = trial_rng(17, 0)
    G = rng.standard_normal((5, 3))
    A = G @ np.diag([1.0, -1.5, 2.0]) @ G.T
    assert_certified(construct_witness_selfadjoint(A, 1, 2))


def test_selfadjoint_witness_rejects_non_hermitian():
    with pytest.raises(PreconditionViolated):
        construct_witness_selfadjoint(random_matrix(trial_rng(18, 0), 3), 1, 2)
