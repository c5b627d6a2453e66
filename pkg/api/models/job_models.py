"""
Job Model - One Command-Line Invocation
=======================================
A Job holds everything that decides a command's output: the command and
its target, the inputs, window and search parameters, and the seed.
Identical jobs produce identical report bytes.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class Job(BaseModel):
    """A fully resolved command invocation"""
    model_config = ConfigDict(frozen=True)

    command: str
    target: Optional[str] = None
    inputs: List[str] = []
    flavor: str = "P"
    window: int = Field(default=2, ge=0, le=4)
    apex: int = Field(default=1, ge=0, le=4)
    seed: int = 0
    bound: int = Field(default=200_000, gt=0)
    out: Optional[str] = None
    save: Optional[str] = None
    format: Literal["json"] = "json"
    jobs: int = Field(default=1, ge=1)
    output_dir: str = "reports"
