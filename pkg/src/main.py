"""Main entry point for the bondspan command line."""

import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from cli.commands import (
    EXIT_INVALID_INSTANCE,
    EXIT_SIZE_GUARD,
    EXIT_USAGE,
    build_parser,
)
from core.config import AppConfig
from core.exceptions import (
    BondspanError,
    InstanceParseError,
    InvalidInstanceError,
    SizeGuardError,
    UsageError,
)
from utils.system import describe_runtime, get_log_dir

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(verbose: bool = False, level: str = "INFO") -> Path | None:
    """
    Setup logging for the command line.

    A log file in the platform log directory always receives ``level`` and
    above; stderr gets a handler only when ``verbose`` is set, so by default it
    carries nothing but the one-line error reason.

    Returns:
        Path of the log file, or None if no log file could be opened
    """
    # Remove any existing handlers
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
    logging.root.setLevel(logging.DEBUG)

    log_file: Path | None = get_log_dir() / "bondspan.log"
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        file_handler.setLevel(getattr(logging, level.upper(), logging.INFO))
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.root.addHandler(file_handler)
    except OSError:
        log_file = None
        logging.root.addHandler(logging.NullHandler())

    if verbose:
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setLevel(logging.DEBUG)
        stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.root.addHandler(stream_handler)

    logging.info("=" * 60)
    logging.info("bondspan started")
    logging.info(f"Log file: {log_file}")
    for key, value in describe_runtime().items():
        logging.info(f"{key}: {value}")
    logging.info("=" * 60)
    return log_file


def report_error(error: BondspanError) -> int:
    """Write the one-line JSON reason to stderr and return the exit code."""
    payload = {"error": error.kind, "message": str(error)}
    if isinstance(error, InstanceParseError):
        payload["line"] = error.line
        payload["column"] = error.column
        code = EXIT_USAGE
    elif isinstance(error, UsageError):
        code = EXIT_USAGE
    elif isinstance(error, InvalidInstanceError):
        code = EXIT_INVALID_INSTANCE
    elif isinstance(error, SizeGuardError):
        code = EXIT_SIZE_GUARD
    else:
        code = EXIT_USAGE
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return report_error(e)

    config = AppConfig.load(args.config)
    setup_logging(args.verbose, config.log_level)
    try:
        return args.handler(args, config)
    except BondspanError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return report_error(e)
    except ValueError as e:
        logger.error(f"ValueError: {e}")
        return report_error(UsageError(str(e)))


if __name__ == "__main__":
    sys.exit(main())
