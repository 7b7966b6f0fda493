"""
Pydantic schema for one CLI invocation.
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Command = Literal["fit", "envelope", "predict", "tables", "rates", "tails", "maxineq", "interp"]


class RunConfig(BaseModel):
    """Parsed command line: the command, its paths, overrides and options."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    input: Optional[str] = None
    output: Optional[str] = None
    overrides: Dict[str, str] = Field(default_factory=dict)
    options: Dict[str, Any] = Field(default_factory=dict)
    argv: List[str] = Field(default_factory=list, description="replayable command line, without --out and --log-level")
    log_level: Optional[str] = None
