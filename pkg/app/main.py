from typing import List, Optional
import logging
import sys

from app.commands.common import ReportWriter, jsonable, open_output, tolerance_from
from app.commands.main import build_parser
from app.core.config import settings
from app.core.exceptions import SchemaError, SpectralPreserverError

logger = logging.getLogger(__name__)

REPORTED_ARGUMENTS_EXCLUDED = ("handler", "out", "log_level")


def run(argv: Optional[List[str]] = None) -> int:
    """Parse the command line, run one subcommand and return the exit status"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging; the report owns standard output
    logging.basicConfig(level=args.log_level.upper() if args.log_level else settings.LOG_LEVEL, stream=sys.stderr)
    logger.debug(f"Starting {settings.PROJECT_NAME} {settings.VERSION}: {args.command}")

    arguments = {k: jsonable(v) for k, v in vars(args).items() if k not in REPORTED_ARGUMENTS_EXCLUDED}
    try:
        tol = tolerance_from(args)
        stream = open_output(args)
    except SchemaError as e:
        logger.error(f"Invalid invocation: {e.detail}")
        writer = ReportWriter(sys.stdout, args.command, arguments, settings.tolerance())
        code = writer.error(e)
        writer.close(code)
        return code

    writer = ReportWriter(stream, args.command, arguments, tol)
    try:
        code = args.handler(args, writer, tol)
    except SpectralPreserverError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        code = writer.error(e)
    writer.close(code)
    if stream is not sys.stdout:
        stream.close()
    logger.info(f"{args.command} finished with exit status {code}")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
