from argparse import Namespace
from pathlib import Path

from app.commands.common import SUCCESS, ReportWriter, add_tolerances, load_matrix
from app.core.exceptions import DimensionMismatch
from app.models.tolerance import ToleranceConfig
from app.schemas.matrix_schema import MatrixDocument
from app.schemas.report_schema import ResultRecord
from app.schemas.signature_schema import ProductSignature
from app.services.jordan_product import general_product, two_slot_product
from app.services.linalg_core import spectrum


def register(subparsers) -> None:
    parser = subparsers.add_parser("product", help="Generalized Jordan product of the input matrices")
    parser.add_argument("--in", dest="inputs", type=Path, nargs="+", required=True, help="One MatrixDocument per slot")
    parser.add_argument("--signature", help='Slot sequence such as "1,2,1"; omit to use --r/--s with inputs A B')
    parser.add_argument("--position", type=int, help="Distinguished position (1-based)")
    parser.add_argument("--r", type=int, default=1, help="Exponent r for the two-slot product")
    parser.add_argument("--s", type=int, default=2, help="Exponent s for the two-slot product")
    add_tolerances(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    ops = [load_matrix(path) for path in args.inputs]
    payload = {}
    if args.signature:
        sig = ProductSignature.parse(args.signature, args.position)
        product = general_product(sig, ops)
        payload.update({"signature": sig.text(), "r": sig.r, "s": sig.s, "slot": sig.slot})
    else:
        if len(ops) != 2:
            raise DimensionMismatch(f"the two-slot product takes A and B, got {len(ops)} inputs")
        product = two_slot_product(ops[0], ops[1], args.r, args.s)
        payload.update({"r": args.r, "s": args.s})
    payload["product"] = MatrixDocument.from_matrix(product).model_dump(exclude_none=True)
    payload["spectrum"] = spectrum(product, tol).to_pairs()
    writer.write(ResultRecord(payload=payload))
    return SUCCESS
