from argparse import Namespace
from pathlib import Path

from app.commands.common import (
    COUNTEREXAMPLE,
    SUCCESS,
    ReportWriter,
    add_exponents,
    add_seed,
    add_tolerances,
    jsonable,
    load_map,
)
from app.core.config import settings
from app.models.tolerance import ToleranceConfig
from app.schemas.matrix_schema import MatrixDocument
from app.schemas.report_schema import FailureRecord, ResultRecord
from app.services.preserver_recovery import (
    projective_distance,
    recover_2x2,
    recover_full,
    recover_selfadjoint,
    verify_hypothesis,
)


def register(subparsers) -> None:
    recover = subparsers.add_parser("recover", help="Recover the canonical form of a spectral preserver")
    recover.add_argument("--map", dest="map_path", type=Path, required=True, help="MapDocument file")
    recover.add_argument("--method", choices=["full", "2x2", "selfadjoint"], default="full", help="Recovery pipeline")
    add_exponents(recover)
    add_seed(recover)
    add_tolerances(recover)
    recover.set_defaults(handler=handle_recover)

    verify = subparsers.add_parser("verify", help="Check spectral preservation on random rank ≤ 1 pairs")
    verify.add_argument("--map", dest="map_path", type=Path, required=True, help="MapDocument file")
    verify.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS, help="Number of random pairs")
    verify.add_argument("--selfadjoint", action="store_true", help="Sample self-adjoint factors")
    add_exponents(verify)
    add_seed(verify)
    add_tolerances(verify)
    verify.set_defaults(handler=handle_verify)


def handle_recover(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    document = load_map(args.map_path)
    phi = document.to_map()
    if args.method == "2x2":
        _, model = recover_2x2(phi, args.r, args.s, args.seed, tol=tol)
    elif args.method == "selfadjoint":
        model = recover_selfadjoint(phi, args.r, args.s, args.seed, tol)
    else:
        model = recover_full(phi, args.r, args.s, args.seed, tol)

    payload = {**model.to_dict(), "T": MatrixDocument.from_matrix(model.T).model_dump(exclude_none=True)}
    exit_code = SUCCESS
    reference = document.reference
    if reference is not None and document.kind != "table":
        distance = projective_distance(model.T, reference)
        matches = (
            distance <= settings.VALIDATION_TOLERANCE
            and abs(model.lam - document.scalar) <= settings.ROOT_SNAP_TOLERANCE
            and model.transposed == document.transposed
        )
        payload.update({"projective_distance": distance, "matches_generator": matches})
        exit_code = SUCCESS if matches else COUNTEREXAMPLE
    writer.write(ResultRecord(payload=payload))
    return exit_code


def handle_verify(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    phi = load_map(args.map_path).to_map()
    report = verify_hypothesis(phi, args.r, args.s, args.trials, args.seed, tol, hermitian=args.selfadjoint)
    writer.counts = {"trials": report.trials, "passes": report.passes, "failures": report.trials - report.passes}
    writer.write(ResultRecord(payload={"passes": report.passes, "trials": report.trials, "max_mismatch": jsonable(report.max_mismatch)}))
    if report.counterexample is not None:
        ce = report.counterexample
        writer.write(
            FailureRecord(
                trial=ce["trial"],
                seed=ce["seed"],
                detail="spectrum of the image product differs",
                inputs={
                    "A": MatrixDocument.from_matrix(ce["A"]).model_dump(exclude_none=True),
                    "B": MatrixDocument.from_matrix(ce["B"]).model_dump(exclude_none=True),
                },
                observed=ce["observed"].to_pairs(),
                expected=ce["expected"].to_pairs(),
            )
        )
    return SUCCESS if report.passed else COUNTEREXAMPLE
