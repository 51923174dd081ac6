from argparse import ArgumentParser

from app.commands import (
    fuzz_command,
    product_command,
    rank_command,
    reconstruct_command,
    recover_command,
    spectrum_command,
)
from app.core.config import settings


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="jordan-spectra", description=settings.DESCRIPTION)
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL for this run")
    subparsers = parser.add_subparsers(dest="command", required=True)

    spectrum_command.register(subparsers)
    product_command.register(subparsers)
    rank_command.register(subparsers)
    fuzz_command.register(subparsers)
    reconstruct_command.register(subparsers)
    recover_command.register(subparsers)
    return parser
