"""
Shared command plumbing: report stream writer, common flags and input loading
"""

from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Any, Dict, IO, Optional
import sys
import time

import numpy as np
from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.exceptions import SchemaError, SpectralPreserverError
from app.models.tolerance import ToleranceConfig
from app.schemas.map_schema import MapDocument, parse_map_document
from app.schemas.matrix_schema import parse_matrix
from app.schemas.report_schema import ErrorRecord, HeaderRecord, SummaryRecord, dump_record

SUCCESS = 0
COUNTEREXAMPLE = 1


class ReportWriter:
    """JSON Lines report: header, body records, summary"""

    def __init__(self, stream: IO[str], command: str, arguments: Dict[str, Any], tolerance: ToleranceConfig):
        self.stream = stream
        self.started = time.perf_counter()
        self.counts: Dict[str, Optional[int]] = {"trials": None, "passes": None, "failures": None}
        self.write(
            HeaderRecord(
                version=settings.REPORT_FORMAT_VERSION,
                command=command,
                arguments=arguments,
                tolerance=tolerance.to_dict(),
            )
        )

    def write(self, record: BaseModel) -> None:
        self.stream.write(dump_record(record) + "\n")

    def error(self, e: SpectralPreserverError) -> int:
        self.write(ErrorRecord(error=type(e).__name__, detail=e.detail, exit_code=e.exit_code, context=jsonable(e.context)))
        return e.exit_code

    def close(self, exit_code: int) -> None:
        self.write(SummaryRecord(exit_code=exit_code, wall_time=time.perf_counter() - self.started, **self.counts))
        self.stream.flush()


def jsonable(value: Any) -> Any:
    """Complex scalars as [re, im], arrays as nested lists of pairs"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def add_exponents(parser: ArgumentParser) -> None:
    parser.add_argument("--r", type=int, default=1, help="Exponent r (0 ≤ r ≤ s)")
    parser.add_argument("--s", type=int, default=2, help="Exponent s")


def add_seed(parser: ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed; trials derive independent streams from it")


def add_tolerances(parser: ArgumentParser) -> None:
    parser.add_argument("--tol-zero", type=float, dest="tol_zero", help="Relative zero threshold")
    parser.add_argument("--tol-distinct", type=float, dest="tol_distinct", help="Relative clustering radius")
    parser.add_argument("--tol-rank", type=float, dest="tol_rank", help="Relative singular value cutoff")
    parser.add_argument("--tol-match", type=float, dest="tol_match", help="Relative spectra matching radius")
    parser.add_argument("--out", type=Path, help="Write the report here instead of standard output")


def tolerance_from(args: Namespace) -> ToleranceConfig:
    overrides = {
        key: getattr(args, f"tol_{key}", None)
        for key in ("zero", "distinct", "rank", "match")
        if getattr(args, f"tol_{key}", None) is not None
    }
    try:
        return settings.tolerance(overrides)
    except ValidationError as e:
        raise SchemaError("invalid tolerance override", [f"{err['loc']}: {err['msg']}" for err in e.errors()])


def read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"cannot read {path}", [str(e)])


def load_matrix(path: Path) -> np.ndarray:
    try:
        return parse_matrix(read_text(path))
    except SchemaError as e:
        raise SchemaError(f"{path}: {e.detail}", e.diagnostics)


def load_map(path: Path) -> MapDocument:
    try:
        return parse_map_document(read_text(path))
    except SchemaError as e:
        raise SchemaError(f"{path}: {e.detail}", e.diagnostics)


def open_output(args: Namespace) -> IO[str]:
    if getattr(args, "out", None) is None:
        return sys.stdout
    try:
        return open(args.out, "w", encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot write {args.out}", [str(e)])
