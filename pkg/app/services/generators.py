"""
Seeded Generators

Random test objects shared by fuzz campaigns and the test suite. Every
generator draws from an explicit numpy Generator so that a (seed, trial)
pair replays the same objects.
"""

from typing import Optional, Tuple

import numpy as np

from app.core.exceptions import PreconditionViolated
from app.services.linalg_core import conjugate, embed
from app.models.rank_one import RankOneFunctional
from app.services.black_box import SimilarityMap, UnitaryMap

SEED_MASK = (1 << 64) - 1


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, keyed by (seed, trial index)"""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & SEED_MASK, int(trial)]))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    return complex_gaussian(rng, (n, n))


def random_of_rank(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Product of n×k and k×n Gaussian factors (rank k almost surely)"""
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    return complex_gaussian(rng, (n, k)) @ complex_gaussian(rng, (k, n))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_well_conditioned(rng: np.random.Generator, n: int, max_condition: float = 30.0) -> np.ndarray:
    """U·diag(σ)·V* with σ in [1, max_condition]"""
    sigma = np.exp(rng.uniform(0.0, np.log(max_condition), size=n))
    sigma[0] = 1.0
    return random_unitary(rng, n) @ np.diag(sigma) @ random_unitary(rng, n).conj().T


def random_square_zero(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Square-zero matrix of rank k in a random basis (needs 2k ≤ n)"""
    if 2 * k > n:
        raise PreconditionViolated(f"square-zero rank {k} needs dimension ≥ {2 * k}")
    F = np.zeros((n, n), dtype=np.complex128)
    F[k:2 * k, :k] = np.eye(k)
    return conjugate(random_well_conditioned(rng, n), F)


RANK_TWO_FORMS = ("i", "ii", "iii", "iv")


def rank_two_form(form: str, a: complex = 1.0, b: complex = 0.0, c: complex = 2.0) -> np.ndarray:
    """The canonical rank-2 blocks (i)–(iv), unembedded"""
    if form == "i":
        return np.array([[a, 0, b], [0, 0, 0], [0, 0, c]], dtype=np.complex128)
    if form == "ii":
        return np.array([[a, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=np.complex128)
    if form == "iii":
        return np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=np.complex128)
    if form == "iv":
        F = np.zeros((4, 4), dtype=np.complex128)
        F[:2, 2:] = np.eye(2)
        return F
    raise PreconditionViolated(f"unknown rank-2 form {form!r}")


def random_rank_two_form(rng: np.random.Generator, n: int, form: str) -> np.ndarray:
    """A canonical rank-2 form with random nonzero parameters in a random basis"""
    a, b, c = complex_gaussian(rng, 3)
    a = a / abs(a) * rng.uniform(0.5, 2.0)
    c = c / abs(c) * rng.uniform(0.5, 2.0)
    F = embed(rank_two_form(form, a, b, c), n)
    return conjugate(random_well_conditioned(rng, n), F)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    G = complex_gaussian(rng, (n, n))
    return (G + G.conj().T) / 2.0


def random_hermitian_of_rank(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """U·diag(λ₁..λ_k, 0..)·U* with |λ_i| in [0.5, 2] and random signs"""
    lam = rng.uniform(0.5, 2.0, size=k) * rng.choice([-1.0, 1.0], size=k)
    U = random_unitary(rng, n)[:, :k]
    return (U * lam) @ U.conj().T


def random_idempotent(rng: np.random.Generator, n: int, min_pairing: float = 0.1) -> RankOneFunctional:
    """x⊗f with |⟨x,f⟩| ≥ min_pairing·‖x‖‖f‖ before renormalizing to ⟨x,f⟩ = 1"""
    while True:
        x = complex_gaussian(rng, n)
        f = complex_gaussian(rng, n)
        if abs(np.dot(f, x)) >= min_pairing * np.linalg.norm(x) * np.linalg.norm(f):
            return RankOneFunctional.idempotent(x, f)


def random_projection(rng: np.random.Generator, n: int) -> RankOneFunctional:
    """Orthogonal rank-one projection x⊗x̄ with ‖x‖ = 1"""
    x = complex_gaussian(rng, n)
    x = x / np.linalg.norm(x)
    return RankOneFunctional.idempotent(x, x.conj())


def random_root_of_unity(rng: np.random.Generator, m: int) -> complex:
    return complex(np.exp(2j * np.pi * rng.integers(0, m) / m))


def random_similarity_map(
    rng: np.random.Generator, n: int, m: int, transposed: bool, max_condition: float = 30.0
) -> SimilarityMap:
    return SimilarityMap(random_root_of_unity(rng, m), random_well_conditioned(rng, n, max_condition), transposed)


def random_unitary_map(
    rng: np.random.Generator, n: int, m: int, transposed: bool, xi: Optional[int] = None
) -> UnitaryMap:
    """ξ·U(·)U* with ξ ∈ {−1, 1} and ξᵐ = 1"""
    if xi is None:
        xi = -1 if (m % 2 == 0 and rng.random() < 0.5) else 1
    return UnitaryMap(xi, random_unitary(rng, n), transposed)


def witness_shaped(rng: np.random.Generator, n: int) -> np.ndarray:
    """Rank ≤ 3 matrix built like the explicit witnesses: a small block in a random basis"""
    k = int(rng.integers(1, min(3, n) + 1))
    theta = rng.uniform(0.0, np.pi)
    block = np.diag(rng.integers(1, 4, size=k).astype(np.complex128))
    if k >= 2:
        block[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    return conjugate(random_well_conditioned(rng, n), embed(block, n))


def mixed_probe(rng: np.random.Generator, n: int, trial: int) -> Tuple[str, np.ndarray]:
    """Rotate through full-rank, rank ≤ 3 and witness-shaped matrices"""
    kind = trial % 3
    if kind == 0:
        return "full-rank", random_matrix(rng, n)
    if kind == 1:
        return "rank<=3", random_of_rank(rng, n, int(rng.integers(1, min(3, n) + 1)))
    return "witness-shaped", witness_shaped(rng, n)
