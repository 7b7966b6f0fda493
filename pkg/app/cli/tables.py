"""
`tables`: envelope growth, entropy regimes and moment requirements as exact rationals.
"""
from app.cli.deps import Outcome, reject_overrides
from app.schemas.run import RunConfig
from app.services import rate_theory
from app.utils.csv_io import frame_text

NAME = "tables"


def add_parser(subparsers) -> None:
    subparsers.add_parser(NAME, help="regenerate the s / alpha / moment tables")


def handle(config: RunConfig) -> Outcome:
    reject_overrides(config)
    files = {f"{name}.csv": frame_text(frame) for name, frame in rate_theory.tables().items()}
    stdout = "\n".join(f"# {name[:-4]}\n{text}" for name, text in files.items())
    return Outcome(stdout=stdout, files=files)
