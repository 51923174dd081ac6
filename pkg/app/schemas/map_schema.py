"""
Black-box map document schemas
"""

from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from app.core.exceptions import SchemaError
from app.schemas.matrix_schema import ComplexPair, MatrixDocument, validation_diagnostics, load_document
from app.services.black_box import BlackBoxMap, LinearTableMap, SimilarityMap, UnitaryMap


class MapDocument(BaseModel):
    kind: Literal["similarity", "unitary", "table"] = Field(..., description="similarity|unitary|table")
    n: int = Field(..., ge=1, description="Dimension the map acts on")
    lam: ComplexPair = Field([1.0, 0.0], description="Scalar λ (ξ for unitary maps) as [re, im]")
    T: Optional[MatrixDocument] = Field(None, description="Similarity T or unitary U")
    transposed: bool = Field(False, description="Apply the transpose before conjugating")
    images: Optional[List[MatrixDocument]] = Field(None, description="Images of the row-major basis E₁₁, E₁₂, …")
    tag: Optional[str] = Field(None, description="Free-form label")

    @model_validator(mode="after")
    def check_kind(self) -> "MapDocument":
        if self.kind == "table":
            if self.images is None or len(self.images) != self.n * self.n:
                raise ValueError(f"table maps need exactly n² = {self.n * self.n} images")
            if any(img.n != self.n for img in self.images):
                raise ValueError("every image must be n×n")
        else:
            if self.T is None:
                raise ValueError(f"{self.kind} maps need T")
            if self.T.n != self.n:
                raise ValueError(f"T has dimension {self.T.n}, expected n = {self.n}")
        if len(self.lam) != 2:
            raise ValueError("lam must be an [re, im] pair")
        return self

    @property
    def scalar(self) -> complex:
        return complex(self.lam[0], self.lam[1])

    def to_map(self) -> BlackBoxMap:
        if self.kind == "table":
            return LinearTableMap.from_images([img.to_matrix() for img in self.images])
        if self.kind == "unitary":
            return UnitaryMap(self.scalar, self.T.to_matrix(), self.transposed)
        return SimilarityMap(self.scalar, self.T.to_matrix(), self.transposed)

    @property
    def reference(self) -> Optional[np.ndarray]:
        """Generator T when the document encodes a canonical form"""
        return None if self.T is None else self.T.to_matrix()


def parse_map_document(document: Union[str, bytes, dict]) -> MapDocument:
    if not isinstance(document, dict):
        document = load_document(document)
    try:
        return MapDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError("invalid map document", validation_diagnostics(e))
