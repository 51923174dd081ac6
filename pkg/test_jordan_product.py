import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.core.exceptions import BadExponents, DimensionMismatch, InvalidSignature
from app.schemas.signature_schema import ProductSignature
from app.services.generators import random_hermitian, random_matrix, trial_rng
from app.services.jordan_product import (
    check_exponents,
    general_product,
    slot_assignment,
    specialize,
    two_slot_product,
)


@pytest.mark.parametrize(
    "text, k, m, p, r, s",
    [
        ("1,2", 2, 2, 1, 0, 1),
        ("2,1,2", 2, 3, 2, 1, 1),
        ("1,2,2", 2, 3, 1, 0, 2),
        ("2,2,1,2,2", 2, 5, 3, 2, 2),
        ("2,1,2,2", 2, 4, 2, 1, 2),
        ("1,2,3", 3, 3, 1, 0, 2),
    ],
)
def test_signature_exponents(text, k, m, p, r, s):
    sig = ProductSignature.parse(text)
    assert (sig.k, sig.m, sig.p, sig.r, sig.s) == (k, m, p, r, s)
    assert sig.r + sig.s == sig.m - 1
    assert sig.text() == text


@pytest.mark.parametrize("seq", [(1, 1), (1, 3), (2, 2, 1, 1), (1,), (0, 1)])
def test_invalid_signatures_rejected_at_construction(seq):
    with pytest.raises(InvalidSignature):
        ProductSignature.create(seq)


def test_explicit_position_must_be_unique_slot():
    assert ProductSignature.create((1, 2, 3), position=2).slot == 2
    with pytest.raises(InvalidSignature):
        ProductSignature.create((2, 1, 2), position=1)


def test_signature_text_must_be_integers():
    with pytest.raises(InvalidSignature):
        ProductSignature.parse("1,b,2")


def test_usual_jordan_product(rng):
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    out = general_product(ProductSignature.parse("1,2"), [A, B])
    assert_allclose(out, A @ B + B @ A, atol=1e-12)


def test_triple_product(rng):
    A, B, C = (random_matrix(rng, 3) for _ in range(3))
    out = general_product(ProductSignature.parse("1,2,3"), [A, B, C])
    assert_allclose(out, A @ B @ C + C @ B @ A, atol=1e-12)


def test_identity_jordan_product_is_twice_identity():
    I = np.eye(3)
    assert_allclose(general_product(ProductSignature.parse("1,2"), [I, I]), 2 * I)


def test_general_product_checks_operands(rng):
    sig = ProductSignature.parse("1,2")
    with pytest.raises(DimensionMismatch):
        general_product(sig, [np.eye(2), np.eye(3)])
    with pytest.raises(DimensionMismatch):
        general_product(sig, [np.eye(2)])


@pytest.mark.parametrize(
    "r, s, expected",
    [
        (0, 1, lambda A, B: A @ B + B @ A),
        (1, 1, lambda A, B: 2 * B @ A @ B),
        (0, 2, lambda A, B: A @ B @ B + B @ B @ A),
        (1, 2, lambda A, B: B @ A @ B @ B + B @ B @ A @ B),
    ],
)
def test_two_slot_product(rng, r, s, expected):
    A, B = random_matrix(rng, 4), random_matrix(rng, 4)
    assert_allclose(two_slot_product(A, B, r, s), expected(A, B), atol=1e-12)


@pytest.mark.parametrize("r, s", [(0, 0), (2, 1), (-1, 1)])
def test_bad_exponents(r, s):
    with pytest.raises(BadExponents):
        check_exponents(r, s)
    with pytest.raises(BadExponents):
        two_slot_product(np.eye(2), np.eye(2), r, s)


def test_strict_exponents_require_s_above_r():
    check_exponents(1, 1)
    with pytest.raises(BadExponents):
        check_exponents(1, 1, strict=True)


def test_two_slot_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        two_slot_product(np.eye(2), np.eye(3), 0, 1)


@pytest.mark.parametrize("text", ["2,1,2", "1,2,2", "2,1,2,2", "3,1,3,2,3", "2,2,2,1,2,2"])
def test_specialize_reduces_to_two_slot_product(text):
    sig = ProductSignature.parse(text)
    for trial in range(20):
        rng = trial_rng(7, trial)
        A, B = random_matrix(rng, 4), random_matrix(rng, 4)
        direct = general_product(sig, slot_assignment(sig, A, B))
        scale = max(1.0, float(np.linalg.norm(direct)))
        assert np.linalg.norm(specialize(sig, A, B) - direct) <= 1e-12 * scale
        assert np.linalg.norm(two_slot_product(A, B, sig.r, sig.s) - direct) <= 1e-10 * scale


def test_general_product_symmetric_under_reversal(rng):
    mats = [random_matrix(rng, 3) for _ in range(3)]
    forward = general_product(ProductSignature.parse("1,2,3,2"), mats)
    backward = general_product(ProductSignature.parse("2,3,2,1"), mats)
    assert_allclose(forward, backward, atol=1e-12)


def test_selfadjoint_inputs_give_selfadjoint_product(rng):
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    P = two_slot_product(A, B, 1, 3)
    assert np.linalg.norm(P - P.conj().T) <= 1e-10 * max(1.0, float(np.linalg.norm(P)))
