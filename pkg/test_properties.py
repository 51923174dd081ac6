import numpy as np
import pytest

hypothesis = pytest.importorskip("hypothesis")
from hypothesis import given, settings as hypothesis_settings, strategies as st  # noqa: E402

from app.schemas.signature_schema import ProductSignature  # noqa: E402
from app.services.generators import random_idempotent, random_matrix, random_well_conditioned, trial_rng  # noqa: E402
from app.services.idempotent_analysis import jordan_eig_class  # noqa: E402
from app.services.jordan_product import general_product, slot_assignment, specialize, two_slot_product  # noqa: E402
from app.services.linalg_core import conjugate, spectra_equal, spectrum  # noqa: E402

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dimensions = st.integers(min_value=2, max_value=6)
exponents = st.tuples(st.integers(0, 3), st.integers(1, 4)).filter(lambda rs: rs[0] <= rs[1])


@hypothesis_settings(max_examples=50, deadline=None)
@given(seed=seeds, n=dimensions)
def test_spectrum_is_similarity_invariant(seed, n):
    rng = trial_rng(seed, 0)
    A = random_matrix(rng, n)
    S = random_well_conditioned(rng, n, max_condition=10.0)
    assert spectra_equal(spectrum(A), spectrum(conjugate(S, A)))


@hypothesis_settings(max_examples=50, deadline=None)
@given(seed=seeds, n=dimensions)
def test_jordan_product_trace_matches_first_moment(seed, n):
    rng = trial_rng(seed, 1)
    A = random_matrix(rng, n)
    P = random_idempotent(rng, n)
    cls = jordan_eig_class(A, P)
    product = A @ P.matrix + P.matrix @ A
    assert abs(np.trace(product) - 2 * cls.first_moment) <= 1e-10 * max(1.0, float(np.linalg.norm(product)))


@hypothesis_settings(max_examples=50, deadline=None)
@given(seed=seeds, rs=exponents)
def test_two_slot_product_is_symmetric_in_exponents(seed, rs):
    r, s = rs
    rng = trial_rng(seed, 2)
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    P = two_slot_product(A, B, r, s)
    Bp = [np.linalg.matrix_power(B, k) for k in (r, s)]
    expected = Bp[0] @ A @ Bp[1] + Bp[1] @ A @ Bp[0]
    assert np.linalg.norm(P - expected) <= 1e-10 * max(1.0, float(np.linalg.norm(expected)))


@st.composite
def signatures(draw):
    k = draw(st.integers(2, 3))
    m = draw(st.integers(k, 6))
    p = draw(st.integers(0, m - 1))
    others = draw(st.lists(st.integers(2, k), min_size=m - 1, max_size=m - 1).filter(lambda xs: set(xs) == set(range(2, k + 1))))
    return ProductSignature.create(tuple(others[:p] + [1] + others[p:]))


@hypothesis_settings(max_examples=50, deadline=None)
@given(seed=seeds, sig=signatures())
def test_specialize_matches_general_product(seed, sig):
    rng = trial_rng(seed, 3)
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    direct = general_product(sig, slot_assignment(sig, A, B))
    reduced = two_slot_product(A, B, sig.r, sig.s)
    assert np.linalg.norm(specialize(sig, A, B) - direct) <= 1e-12 * max(1.0, float(np.linalg.norm(direct)))
    assert np.linalg.norm(reduced - direct) <= 1e-10 * max(1.0, float(np.linalg.norm(direct)))
