from argparse import Namespace
from pathlib import Path

from app.commands.common import (
    COUNTEREXAMPLE,
    SUCCESS,
    ReportWriter,
    add_exponents,
    add_seed,
    add_tolerances,
    load_matrix,
)
from app.core.config import settings
from app.models.tolerance import ToleranceConfig
from app.schemas.matrix_schema import MatrixDocument
from app.schemas.report_schema import ResultRecord
from app.services.linalg_core import is_square_zero, rank
from app.services.rank_witness import (
    RankVerdict,
    WitnessReport,
    classify_rank_one,
    construct_square_zero_witness,
    construct_witness,
    construct_witness_selfadjoint,
)


def register(subparsers) -> None:
    classify = subparsers.add_parser("classify-rank", help="Decide rank one from Jordan-product spectra")
    classify.add_argument("--in", dest="input", type=Path, required=True, help="MatrixDocument file")
    classify.add_argument("--budget", type=int, default=settings.DEFAULT_BUDGET, help="Fuzz and search budget")
    classify.add_argument("--selfadjoint", action="store_true", help="Restrict witnesses to self-adjoint matrices")
    add_exponents(classify)
    add_seed(classify)
    add_tolerances(classify)
    classify.set_defaults(handler=handle_classify)

    witness = subparsers.add_parser("witness", help="Construct a rank ≤ 3 witness for a matrix of rank ≥ 2")
    witness.add_argument("--in", dest="input", type=Path, required=True, help="MatrixDocument file")
    witness.add_argument("--selfadjoint", action="store_true", help="Self-adjoint construction")
    add_exponents(witness)
    add_tolerances(witness)
    witness.set_defaults(handler=handle_witness)


def witness_payload(report: WitnessReport) -> dict:
    return {
        "construction": report.construction,
        "witness": MatrixDocument.from_matrix(report.witness, report.construction).model_dump(exclude_none=True),
        "spectrum": report.spectrum.to_pairs(),
        "distinct_nonzero": report.distinct_nonzero_count,
    }


def handle_classify(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    A = load_matrix(args.input)
    result = classify_rank_one(A, args.r, args.s, args.budget, args.seed, tol, selfadjoint=args.selfadjoint)
    payload = {"verdict": result.verdict.value, "rank": result.rank}
    if result.witness is not None:
        payload.update(witness_payload(result.witness))
    if result.fuzz is not None:
        payload["fuzz"] = {
            "trials": result.fuzz.trials,
            "max_distinct_nonzero": result.fuzz.max_distinct_nonzero,
            "offending_trial": result.fuzz.offending_trial,
        }
    writer.write(ResultRecord(payload=payload))
    return COUNTEREXAMPLE if result.verdict == RankVerdict.INCONCLUSIVE else SUCCESS


def handle_witness(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    A = load_matrix(args.input)
    if args.selfadjoint:
        report = construct_witness_selfadjoint(A, args.r, args.s, tol)
    elif args.r == 0 and is_square_zero(A, tol) and rank(A, tol) >= 3:
        report = construct_square_zero_witness(A, args.s, tol)
    else:
        report = construct_witness(A, args.r, args.s, tol)
    writer.write(ResultRecord(payload=witness_payload(report)))
    return SUCCESS if report.distinct_nonzero_count >= 3 else COUNTEREXAMPLE
