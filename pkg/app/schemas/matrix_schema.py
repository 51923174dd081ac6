"""
Matrix document schemas
"""

import json
import math
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from app.core.exceptions import SchemaError

ComplexPair = List[float]


class MatrixDocument(BaseModel):
    n: int = Field(..., ge=1, description="Matrix dimension")
    data: List[List[ComplexPair]] = Field(..., description="Row-major n×n entries as [re, im] pairs")
    tag: Optional[str] = Field(None, description="Free-form label")

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixDocument":
        if len(self.data) != self.n:
            raise ValueError(f"data has {len(self.data)} rows, expected n = {self.n}")
        for i, row in enumerate(self.data):
            if len(row) != self.n:
                raise ValueError(f"row {i} has {len(row)} entries, expected n = {self.n}")
            for j, entry in enumerate(row):
                if len(entry) != 2:
                    raise ValueError(f"entry ({i}, {j}) must be an [re, im] pair")
                if not all(math.isfinite(v) for v in entry):
                    raise ValueError(f"entry ({i}, {j}) is not finite")
        return self

    @classmethod
    def from_matrix(cls, M: np.ndarray, tag: Optional[str] = None) -> "MatrixDocument":
        M = np.asarray(M, dtype=np.complex128)
        data = [[[float(z.real), float(z.imag)] for z in row] for row in M]
        return cls(n=M.shape[0], data=data, tag=tag)

    def to_matrix(self) -> np.ndarray:
        return np.array([[complex(re, im) for re, im in row] for row in self.data], dtype=np.complex128)


def validation_diagnostics(e: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or '<document>'}: {err['msg']}" for err in e.errors()]


def load_document(text: Union[str, bytes]) -> Any:
    """Decode JSON text, reporting the line and column of syntax errors"""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("document is not valid JSON", [f"line {e.lineno}, column {e.colno}: {e.msg}"])


def parse_matrix_document(document: Union[str, bytes, dict]) -> MatrixDocument:
    if not isinstance(document, dict):
        document = load_document(document)
    try:
        return MatrixDocument.model_validate(document)
    except ValidationError as e:
        raise SchemaError("invalid matrix document", validation_diagnostics(e))


def parse_matrix(document: Union[str, bytes, dict]) -> np.ndarray:
    """Exact entry mapping of a MatrixDocument to a complex matrix"""
    return parse_matrix_document(document).to_matrix()


def complex_pair(z: complex) -> ComplexPair:
    z = complex(z)
    return [float(z.real), float(z.imag)]
