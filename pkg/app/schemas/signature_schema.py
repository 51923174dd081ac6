"""
Product Signature Schema

A signature (i₁,…,iₘ) over slots {1,…,k} with a distinguished position p whose
slot index occurs exactly once. The reduced exponents r ≤ s satisfy r+s = m−1.
"""

from collections import Counter
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from app.core.config import settings
from app.core.exceptions import InvalidSignature


class ProductSignature(BaseModel):
    """Validated generalized Jordan product signature"""

    model_config = {"frozen": True}

    seq: Tuple[int, ...] = Field(..., description="Slot indices i₁,…,iₘ (1-based)")
    position: Optional[int] = Field(None, ge=1, description="Distinguished position p (1-based)")

    @model_validator(mode="after")
    def check_definition(self) -> "ProductSignature":
        m = len(self.seq)
        if m < 2:
            raise ValueError("a product needs at least two factors")
        if m > settings.MAX_PRODUCT_LENGTH:
            raise ValueError(f"product length {m} exceeds {settings.MAX_PRODUCT_LENGTH}")
        if min(self.seq) < 1:
            raise ValueError("slot indices are 1-based")
        k = max(self.seq)
        if set(self.seq) != set(range(1, k + 1)):
            raise ValueError(f"slots {sorted(set(self.seq))} do not cover 1..{k}")

        counts = Counter(self.seq)
        if self.position is None:
            singles = [q for q, i in enumerate(self.seq, start=1) if counts[i] == 1]
            if not singles:
                raise ValueError("no slot index occurs exactly once")
            object.__setattr__(self, "position", singles[0])
        elif self.position > m:
            raise ValueError(f"position {self.position} beyond sequence length {m}")
        elif counts[self.seq[self.position - 1]] != 1:
            raise ValueError(f"slot at position {self.position} occurs more than once")
        return self

    @classmethod
    def create(cls, seq: Sequence[int], position: Optional[int] = None) -> "ProductSignature":
        try:
            return cls(seq=tuple(int(i) for i in seq), position=position)
        except ValidationError as e:
            raise InvalidSignature(f"Invalid product signature {tuple(seq)}: {e.errors()[0]['msg']}")
        except (TypeError, ValueError) as e:
            raise InvalidSignature(f"Invalid product signature {seq!r}: {e}")

    @classmethod
    def parse(cls, text: str, position: Optional[int] = None) -> "ProductSignature":
        """Parse the comma-separated text form, e.g. "2,1,2" """
        try:
            seq = [int(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise InvalidSignature(f"Signature must be comma-separated integers, got {text!r}")
        return cls.create(seq, position)

    @property
    def k(self) -> int:
        return max(self.seq)

    @property
    def m(self) -> int:
        return len(self.seq)

    @property
    def p(self) -> int:
        return int(self.position)

    @property
    def slot(self) -> int:
        """Slot index at the distinguished position"""
        return self.seq[self.p - 1]

    @property
    def r(self) -> int:
        return min(self.p - 1, self.m - self.p)

    @property
    def s(self) -> int:
        return max(self.p - 1, self.m - self.p)

    def text(self) -> str:
        return ",".join(str(i) for i in self.seq)
