from argparse import Namespace
from pathlib import Path

from app.commands.common import SUCCESS, ReportWriter, add_tolerances, load_matrix
from app.models.tolerance import ToleranceConfig
from app.schemas.report_schema import ResultRecord
from app.services.linalg_core import spectrum


def register(subparsers) -> None:
    parser = subparsers.add_parser("spectrum", help="Clustered spectrum of a matrix")
    parser.add_argument("--in", dest="input", type=Path, required=True, help="MatrixDocument file")
    add_tolerances(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    spec = spectrum(load_matrix(args.input), tol)
    writer.write(
        ResultRecord(
            payload={
                "spectrum": spec.to_pairs(),
                "multiplicities": list(spec.multiplicities),
                "scale": spec.scale,
                "trace_residual": spec.trace_residual,
            }
        )
    )
    return SUCCESS
