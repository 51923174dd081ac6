from argparse import Namespace
from pathlib import Path

import numpy as np

from app.commands.common import COUNTEREXAMPLE, SUCCESS, ReportWriter, add_exponents, add_seed, add_tolerances, load_matrix
from app.core.config import settings
from app.models.tolerance import ToleranceConfig
from app.schemas.matrix_schema import MatrixDocument
from app.schemas.report_schema import ResultRecord
from app.services.reconstruction import MatrixSpectralOracle, recover_matrix

RECONSTRUCTION_TOLERANCE = 1e-8


def register(subparsers) -> None:
    parser = subparsers.add_parser("reconstruct", help="Recover a hidden matrix from its spectral oracle")
    parser.add_argument("--in", dest="input", type=Path, required=True, help="Hidden MatrixDocument")
    parser.add_argument("--budget", type=int, default=settings.RECONSTRUCTION_BUDGET, help="Probe budget when r = 0")
    add_exponents(parser)
    add_seed(parser)
    add_tolerances(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    hidden = load_matrix(args.input)
    oracle = MatrixSpectralOracle(hidden, args.r, args.s, tol)
    recovered = recover_matrix(oracle, budget=args.budget, seed=args.seed, tol=tol)
    error = float(np.linalg.norm(recovered - hidden) / max(np.linalg.norm(hidden), 1.0))
    writer.write(
        ResultRecord(
            payload={
                "recovered": MatrixDocument.from_matrix(recovered).model_dump(exclude_none=True),
                "relative_error": error,
                "queries": oracle.queries,
            }
        )
    )
    return SUCCESS if error <= RECONSTRUCTION_TOLERANCE else COUNTEREXAMPLE
