import json

import numpy as np
import pytest

from app.core.config import settings
from app.schemas.matrix_schema import MatrixDocument


@pytest.fixture
def tol():
    return settings.tolerance()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def matrix_file(tmp_path):
    """Write a matrix document and return its path"""

    def _write(M, name="matrix.json", tag=None):
        path = tmp_path / name
        path.write_text(MatrixDocument.from_matrix(np.asarray(M), tag=tag).model_dump_json(), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def read_report():
    """Parse a JSON Lines report into a list of records"""

    def _read(text):
        return [json.loads(line) for line in text.splitlines() if line.strip()]

    return _read
