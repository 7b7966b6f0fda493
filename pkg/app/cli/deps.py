"""
Shared pieces of the command modules: config loading, overrides and
output handling.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel

from app.core.errors import ArgumentError
from app.schemas.run import RunConfig
from app.schemas.shape import ShapeClass
from app.services.reports import build_manifest, json_text

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

M = TypeVar("M", bound=BaseModel)


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser that raises ArgumentError instead of exiting with status 2."""

    def error(self, message: str) -> None:
        raise ArgumentError(f"{self.prog}: {message}")


@dataclass
class Outcome:
    """What a command produced.

    `files` maps output names to their exact text; `stdout` is printed
    when no output directory was given.
    """

    stdout: str
    files: Dict[str, str] = field(default_factory=dict)
    seeds: Dict[str, Any] = field(default_factory=dict)
    resolved: Dict[str, Any] = field(default_factory=dict)
    degraded: bool = False


# ---------------------------------------------------------------------------
# Arguments
# ---------------------------------------------------------------------------


def positive_float(value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive: {value!r}")
    return v


def float_list(value: str) -> list:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {value!r}") from None


def add_class_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--class",
        dest="shape",
        required=True,
        choices=["isotonic", "monotone", "convex", "holder", "lipschitz"],
        help="function class (isotonic = monotone, lipschitz = holder with gamma 1)",
    )
    parser.add_argument("--phi", type=positive_float, default=None, help="sup-norm bound")
    parser.add_argument("--gamma", type=positive_float, default=None, help="Hölder exponent in (0, 1]")
    parser.add_argument("--lip", type=positive_float, default=None, help="Hölder/Lipschitz constant")


def shape_from_options(options: Dict[str, Any]) -> ShapeClass:
    """Build the ShapeClass named by --class/--phi/--gamma/--lip."""
    kind = options["shape"]
    if kind == "isotonic":
        kind = "monotone"
    gamma, lip = options.get("gamma"), options.get("lip")
    if kind == "lipschitz":
        kind, gamma = "holder", 1.0 if gamma is None else gamma
    return ShapeClass(kind=kind, phi=options.get("phi"), gamma=gamma, lip=lip)


# ---------------------------------------------------------------------------
# JSON configs and overrides
# ---------------------------------------------------------------------------


def parse_overrides(pairs) -> Dict[str, str]:
    """Turn repeated `--set key=value` strings into a dict."""
    overrides: Dict[str, str] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ArgumentError(f"--set expects key=value, got {pair!r}")
        overrides[key.strip()] = value
    return overrides


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(data: Dict[str, Any], overrides: Dict[str, str]) -> Dict[str, Any]:
    """Set dotted paths (`noise.q_index=3`) in a JSON document; values are JSON or plain strings."""
    for path, raw in overrides.items():
        parts = path.split(".")
        node: Any = data
        for part in parts[:-1]:
            if isinstance(node, list):
                try:
                    node = node[int(part)]
                except (ValueError, IndexError):
                    raise ArgumentError(f"--set {path}: no element {part!r}") from None
            else:
                node = node.setdefault(part, {})
            if not isinstance(node, (dict, list)):
                raise ArgumentError(f"--set {path}: {part!r} is not an object")
        last = parts[-1]
        if isinstance(node, list):
            try:
                node[int(last)] = _parse_value(raw)
            except (ValueError, IndexError):
                raise ArgumentError(f"--set {path}: no element {last!r}") from None
        else:
            node[last] = _parse_value(raw)
    return data


def load_model(config: RunConfig, model: Type[M]) -> M:
    """Read the JSON config named by --in, apply --set overrides and validate.

    Unknown keys fail validation with their exact name.
    """
    if config.input is None:
        raise ArgumentError(f"{config.command} needs a JSON config (--in PATH)")
    try:
        with open(config.input, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ArgumentError(f"config not found: {config.input}") from None
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"config {config.input} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ArgumentError(f"config {config.input} must hold a JSON object")
    return model.model_validate(apply_overrides(data, config.overrides))


def reject_overrides(config: RunConfig) -> None:
    if config.overrides:
        raise ArgumentError(f"--set applies to JSON-configured commands, not {config.command}")


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def write_outcome(config: RunConfig, outcome: Outcome, stream=None) -> Optional[Path]:
    """Write files plus the manifest into --out, or print stdout.

    Returns:
        The output directory, or None when printing
    """
    if config.output is None:
        (stream or sys.stdout).write(outcome.stdout)
        return None
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in outcome.files.items():
        with open(out / name, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    manifest = build_manifest(config, outcome.files, outcome.seeds, outcome.resolved)
    with open(out / MANIFEST_NAME, "w", encoding="utf-8", newline="") as f:
        f.write(json_text(manifest))
    logger.info("wrote %d file(s) and %s to %s", len(outcome.files), MANIFEST_NAME, out)
    return out
