"""
Command-line surface.

Global flags come before the command:

    python -m app.main [--log-level L] [--out DIR] [--set k=v ...] [--from-manifest PATH] <command> ...
"""
from typing import List, Sequence

from app.cli import envelope, fit, interp, maxineq, predict, rates, tables, tails
from app.cli.deps import CommandLineParser, parse_overrides, write_outcome
from app.core.config import settings
from app.core.errors import ArgumentError
from app.schemas.run import RunConfig
from app.services.reports import read_manifest

COMMANDS = {
    module.NAME: module
    for module in (fit, envelope, predict, tables, rates, tails, maxineq, interp)
}

_GLOBAL_WITH_VALUE = ("--log-level", "--out", "--set", "--from-manifest")
_NOT_REPLAYED = ("--log-level", "--out", "--from-manifest")


def build_parser() -> CommandLineParser:
    parser = CommandLineParser(prog=settings.APP_NAME, description="shape-constrained least squares laboratory")
    parser.add_argument(
        "--log-level",
        dest="log_level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="root logging level (default HEAVYLS_LOG_LEVEL)",
    )
    parser.add_argument("--out", default=None, help="output directory; prints to stdout when absent")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--from-manifest", dest="from_manifest", default=None, help="replay a stored run")
    subparsers = parser.add_subparsers(dest="command", parser_class=CommandLineParser)
    for module in COMMANDS.values():
        module.add_parser(subparsers)
    return parser


def replayable_argv(argv: Sequence[str]) -> List[str]:
    """argv without the flags that do not change results (--out, --log-level, --from-manifest)."""
    kept: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        name = token.split("=", 1)[0]
        if name not in _GLOBAL_WITH_VALUE:
            return kept + list(argv[i:])
        step = 1 if "=" in token else 2
        if name not in _NOT_REPLAYED:
            kept.extend(argv[i:i + step])
        i += step
    return kept


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Parse a command line into a RunConfig.

    With --from-manifest the stored argv is parsed instead; --out and
    --log-level given on the replaying command line still apply.

    Raises:
        ArgumentError: unknown flags, a missing command or a bad manifest
    """
    argv = list(argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.from_manifest is not None:
        stored = [str(token) for token in read_manifest(ns.from_manifest)["argv"]]
        replay = parser.parse_args(stored)
        replay.out = ns.out
        replay.log_level = ns.log_level
        ns, argv = replay, stored
    if ns.command is None:
        raise ArgumentError(f"missing command; choose from {sorted(COMMANDS)}")
    options = {
        key: value
        for key, value in vars(ns).items()
        if key not in ("command", "input", "out", "overrides", "from_manifest", "log_level")
    }
    return RunConfig(
        command=ns.command,
        input=getattr(ns, "input", None),
        output=ns.out,
        overrides=parse_overrides(ns.overrides),
        options=options,
        argv=replayable_argv(argv),
        log_level=ns.log_level,
    )


def dispatch(config: RunConfig, stream=None) -> int:
    """Run the command and write its outcome; returns 2 for a degraded outcome."""
    outcome = COMMANDS[config.command].handle(config)
    write_outcome(config, outcome, stream)
    return 2 if outcome.degraded else 0


__all__ = ["COMMANDS", "build_parser", "dispatch", "parse_args", "replayable_argv"]
