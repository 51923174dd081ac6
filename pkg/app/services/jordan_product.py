"""
Generalized Jordan Products

Evaluation of T_{i₁}···T_{iₘ} + T_{iₘ}···T_{i₁} for a signature, and of the
two-slot reduction BʳABˢ + BˢABʳ obtained by placing A in the distinguished
slot and B everywhere else.
"""

from functools import reduce
from typing import List, Sequence

import numpy as np

from app.core.exceptions import BadExponents, DimensionMismatch
from app.schemas.signature_schema import ProductSignature
from app.services.linalg_core import as_matrix


def check_exponents(r: int, s: int, strict: bool = False) -> None:
    """Reject exponent pairs outside 0 ≤ r ≤ s, (r,s) ≠ (0,0); strict demands s > r"""
    if int(r) != r or int(s) != s:
        raise BadExponents(f"exponents must be integers, got r={r}, s={s}")
    if r < 0 or s < r or (r == 0 and s == 0):
        raise BadExponents(f"exponents must satisfy 0 ≤ r ≤ s and (r,s) ≠ (0,0), got r={r}, s={s}")
    if strict and s == r:
        raise BadExponents(f"s must exceed r, got r={r}, s={s}")


def _same_dimension(ops: Sequence[np.ndarray]) -> int:
    n = ops[0].shape[0]
    for i, op in enumerate(ops):
        if op.shape != (n, n):
            raise DimensionMismatch(f"operand {i + 1} has shape {op.shape}, expected {(n, n)}")
    return n


def general_product(sig: ProductSignature, ops: Sequence[np.ndarray]) -> np.ndarray:
    """T_{i₁}···T_{iₘ} + T_{iₘ}···T_{i₁}"""
    if len(ops) != sig.k:
        raise DimensionMismatch(f"signature {sig.text()} needs {sig.k} operands, got {len(ops)}")
    mats = [as_matrix(op, f"operand {i + 1}") for i, op in enumerate(ops)]
    _same_dimension(mats)
    chain = [mats[i - 1] for i in sig.seq]
    forward = reduce(np.matmul, chain)
    backward = reduce(np.matmul, chain[::-1])
    return forward + backward


def two_slot_product(A: np.ndarray, B: np.ndarray, r: int, s: int) -> np.ndarray:
    """BʳABˢ + BˢABʳ with B⁰ = I"""
    check_exponents(r, s)
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _same_dimension([A, B])
    Br = np.linalg.matrix_power(B, int(r))
    Bs = np.linalg.matrix_power(B, int(s))
    return Br @ A @ Bs + Bs @ A @ Br


def slot_assignment(sig: ProductSignature, A: np.ndarray, B: np.ndarray) -> List[np.ndarray]:
    """A in the distinguished slot, B in every other slot"""
    return [A if i == sig.slot else B for i in range(1, sig.k + 1)]


def specialize(sig: ProductSignature, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """The signature's product with A in the unique slot and B elsewhere; equals BʳABˢ + BˢABʳ"""
    return general_product(sig, slot_assignment(sig, A, B))
