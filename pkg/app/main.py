"""
Command-line entry point.

    python -m app.main predict --regime vc --alpha 0 --beta 1 --s 1

Exit codes: 0 success, 1 argument/configuration error, 2 solver or
experiment degradation, 3 violated invariant.
"""
from dotenv import load_dotenv
load_dotenv()

import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app.cli import dispatch, parse_args
from app.core.config import settings
from app.core.errors import HeavyLSError
from app.schemas.run import RunConfig

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None) -> None:
    """Log to stderr so that stdout carries only reports."""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def run(config: RunConfig, stream=None) -> int:
    """Dispatch a parsed command and map failures to exit codes."""
    try:
        return dispatch(config, stream)
    except ValidationError as exc:
        logger.error("invalid configuration:\n%s", exc)
        return 1
    except HeavyLSError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except (HeavyLSError, ValidationError) as exc:
        configure_logging()
        logger.error("%s", exc)
        return 1
    configure_logging(config.log_level)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
