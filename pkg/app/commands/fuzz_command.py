from argparse import Namespace

from app.commands.common import COUNTEREXAMPLE, SUCCESS, ReportWriter, add_exponents, add_seed, add_tolerances
from app.core.config import settings
from app.models.tolerance import ToleranceConfig
from app.services.campaigns import CAMPAIGNS, run_campaign


def register(subparsers) -> None:
    parser = subparsers.add_parser("fuzz", help="Seeded campaign for one characterization")
    parser.add_argument("--lemma", required=True, choices=list(CAMPAIGNS), help="Campaign identifier")
    parser.add_argument("--n", type=int, default=4, help="Matrix dimension")
    parser.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS, help="Number of trials")
    parser.add_argument("--workers", type=int, help="Thread pool width (defaults to CAMPAIGN_WORKERS)")
    add_exponents(parser)
    add_seed(parser)
    add_tolerances(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, writer: ReportWriter, tol: ToleranceConfig) -> int:
    report = run_campaign(args.lemma, args.n, args.r, args.s, args.trials, args.seed, tol, workers=args.workers)
    records = sorted(report.results + report.failures, key=lambda rec: rec.trial)
    for record in records:
        writer.write(record)
    writer.counts = {"trials": report.trials, "passes": report.passes, "failures": len(report.failures)}
    return COUNTEREXAMPLE if report.failures else SUCCESS
