from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.core.exceptions import DegenerateInput, DimensionMismatch
from app.services.generators import random_matrix, random_of_rank, random_well_conditioned
from app.services.linalg_core import (
    as_matrix,
    complement,
    conjugate,
    embed,
    is_square_zero,
    kernel,
    matching_distance,
    outer,
    pairing,
    rank,
    spectra_equal,
    spectrum,
    spectrum_from_values,
)


def test_spectrum_of_diagonal():
    spec = spectrum(np.diag([3.0, 1.0, 2.0]))
    assert_allclose(spec.values, [1.0, 2.0, 3.0])
    assert spec.multiplicities == (1, 1, 1)
    assert spec.distinct_nonzero_count == 3

def test_spectrum_of_nilpotent_is_zero():
    J = np.diag([1.0, 1.0, 1.0], k=1)
    spec = spectrum(J)
    assert spec.is_zero
    assert spec.values == (0j,)
    assert spec.multiplicities == (4,)

def test_nearby_eigenvalues_collapse_to_one_point():
    spec = spectrum(np.diag([1.0, 1.0 + 1e-9, 5.0]))
    assert len(spec) == 2
    assert spec.multiplicities == (2, 1)

def test_tiny_eigenvalues_collapse_to_zero():
    spec = spectrum(np.diag([1e-12, 0.0, 4.0]))
    assert 0 in spec
    assert spec.nonzero == (4.0 + 0j,)

def test_spectrum_scale_is_at_least_one():
    assert spectrum(np.diag([0.1, 0.2])).scale == 1.0
    assert spectrum(np.diag([10.0, 0.2])).scale == pytest.approx(10.0)

@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros(4), np.zeros((0, 0))])
def test_as_matrix_rejects_non_square(bad):
    with pytest.raises(DimensionMismatch):
        as_matrix(bad)

def test_as_matrix_rejects_non_finite():
    with pytest.raises(DegenerateInput):
        as_matrix([[1.0, np.nan], [0.0, 1.0]])

def test_pairing_is_bilinear():
    x = np.array([1j, 2.0])
    f = np.array([1.0, 1j])
    # no conjugation of either argument
    assert pairing(x, f) == pytest.approx(3j)

def test_outer_entries():
    assert_allclose(outer([1, 2], [3, 4]), [[3, 4], [6, 8]])

def test_outer_rejects_zero_vector():
    with pytest.raises(DegenerateInput):
        outer([0, 0], [1, 1])

def test_outer_rejects_length_mismatch():
    with pytest.raises(DimensionMismatch):
        outer([1, 2, 3], [1, 1])

@pytest.mark.parametrize("k", [0, 1, 2, 4])
def test_rank_of_random_low_rank(rng, k):
    assert rank(random_of_rank(rng, 5, k)) == k

def test_is_square_zero():
    assert is_square_zero(np.array([[0, 1], [0, 0]]))
    assert not is_square_zero(np.eye(2))
    assert is_square_zero(np.zeros((3, 3)))

def test_matching_distance_is_infinite_on_cardinality_mismatch():
    assert matching_distance(spectrum_from_values([1, 2]), spectrum_from_values([1])) == float("inf")

def test_spectra_equal_within_matching_radius():
    a = spectrum_from_values([1.0, 2.0, 1j])
    assert spectra_equal(a, spectrum_from_values([1.0 + 1e-10, 2.0, 1j]))
    assert not spectra_equal(a, spectrum_from_values([1.0 + 1e-3, 2.0, 1j]))

def test_spectrum_from_values_clusters_like_spectrum():
    assert spectra_equal(spectrum_from_values([2, 2, 0, 0]), spectrum(np.diag([2.0, 2.0, 0.0, 0.0])))

def test_kernel_and_complement_dimensions():
    E = np.zeros((3, 3))
    E[0, 0] = 1.0
    N = kernel(E)
    assert N.shape == (3, 2)
    assert_allclose(E @ N, 0, atol=1e-12)
    C = complement(np.eye(3)[:, :1])
    assert C.shape == (3, 2)
    assert_allclose(C[0], 0, atol=1e-12)
    inside = complement(np.eye(3)[:, 1:2], within=N)
    assert inside.shape == (3, 1)
    assert_allclose(np.abs(inside[:, 0]), [0, 0, 1], atol=1e-12)

def test_conjugate_matches_explicit_inverse(rng):
    S = random_well_conditioned(rng, 4)
    F = random_matrix(rng, 4)
    assert_allclose(conjugate(S, F), S @ F @ np.linalg.inv(S), atol=1e-10)

def test_embed_places_block_top_left():
    out = embed(np.ones((2, 2)), 3)
    assert_allclose(out, [[1, 1, 0], [1, 1, 0], [0, 0, 0]])
    with pytest.raises(DimensionMismatch):
        embed(np.ones((4, 4)), 3)


def test_spectrum_of_jordan_witness_product():
    M = embed(np.array([[0, 1, 1], [1, 2, 2], [0, 0, 2]], dtype=complex), 4)
    expected = spectrum_from_values([0.0, 2.0, 1 + np.sqrt(2), 1 - np.sqrt(2)])
    assert spectra_equal(spectrum(M), expected)


def test_spectra_equal_examples():
    assert spectra_equal(spectrum_from_values([1, 2, 3]), spectrum_from_values([3, 2, 1]))
    assert spectra_equal(spectrum_from_values([0]), spectrum_from_values([1e-14]))
    assert not spectra_equal(spectrum_from_values([1, 2]), spectrum_from_values([1, 2, 3]))


def test_rank_of_square_zero_block():
    A = np.zeros((4, 4))
    A[:2, 2:] = np.eye(2)
    assert rank(A) == 2
    assert rank(outer([1, 2, 3], [0, 1, 1])) == 1


def exact_rank(M):
    """Row reduction over the rationals"""
    rows = [[Fraction(int(v)) for v in row] for row in M]
    rank_found, col = 0, 0
    while rank_found < len(rows) and col < len(rows[0]):
        pivot = next((i for i in range(rank_found, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank_found], rows[pivot] = rows[pivot], rows[rank_found]
        for i in range(len(rows)):
            if i != rank_found and rows[i][col] != 0:
                factor = rows[i][col] / rows[rank_found][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank_found])]
        rank_found += 1
        col += 1
    return rank_found


@pytest.mark.parametrize("seed", range(10))
def test_rank_agrees_with_exact_oracle(seed):
    gen = np.random.default_rng(seed)
    n = int(gen.integers(2, 7))
    k = int(gen.integers(0, n + 1))
    M = gen.integers(-3, 4, size=(n, k)) @ gen.integers(-3, 4, size=(k, n))
    assert rank(M) == exact_rank(M)
