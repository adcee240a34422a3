"""命令行运行配置模式。"""
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .query import Dynamics, GainSet, OutputKind

Command = Literal[
    "compute",
    "compare",
    "sweep-omega",
    "sweep-gamma",
    "star-complete",
    "oracle-check",
    "monte-carlo",
]

# commands that build their own graphs from --n / --n-range
_GRAPHLESS = ("sweep-omega", "star-complete")


class RunConfig(BaseModel):
    """One CLI invocation after parsing."""

    command: Command
    graph: Optional[str] = Field(default=None, description="Family shorthand or graph JSON path")
    jordan: Optional[Path] = Field(default=None, description="Jordan import JSON")
    dynamics: Dynamics = Dynamics.FIRST
    output: OutputKind = OutputKind.POSITION
    gains: Optional[GainSet] = None
    C: str = Field(default="dav", description="dav, local or a JSON matrix file")
    input: str = Field(default="identity", description="identity, w0:FILE or sigma0:FILE")
    out: Optional[Path] = None
    tol: dict[str, float] = Field(default_factory=dict)
    n: Optional[int] = Field(default=None, ge=2)
    n_range: Optional[tuple[int, int]] = None
    gamma_grid: Optional[tuple[float, float, int]] = None
    samples: int = Field(default=10_000, ge=2)
    seed: int = 0

    @field_validator("gains", mode="before")
    @classmethod
    def parse_gains(cls, v: object) -> object:
        if isinstance(v, str):
            return GainSet.parse(v)
        return v

    @field_validator("n_range", mode="before")
    @classmethod
    def parse_n_range(cls, v: object) -> object:
        if isinstance(v, str):
            lo, sep, hi = v.partition(":")
            if not sep:
                raise ValueError(f"--n-range expects A:B, got {v!r}")
            return int(lo), int(hi)
        return v

    @field_validator("gamma_grid", mode="before")
    @classmethod
    def parse_gamma_grid(cls, v: object) -> object:
        if isinstance(v, str):
            parts = v.split(":")
            if len(parts) != 3:
                raise ValueError(f"--gamma-grid expects START:STOP:NUM, got {v!r}")
            return float(parts[0]), float(parts[1]), int(parts[2])
        return v

    @model_validator(mode="after")
    def check_sources(self) -> "RunConfig":
        if self.command in _GRAPHLESS:
            if self.graph is not None:
                raise ValueError(f"{self.command} builds its own graphs; drop --graph")
        elif self.graph is None:
            raise ValueError(f"{self.command} needs --graph")
        if self.command == "sweep-omega" and self.n is None:
            raise ValueError("sweep-omega needs --n")
        if self.command == "star-complete" and self.n_range is None:
            raise ValueError("star-complete needs --n-range")
        if self.command == "sweep-gamma":
            if self.dynamics != Dynamics.SECOND:
                raise ValueError("sweep-gamma is a second-order experiment")
            if self.gamma_grid is None:
                raise ValueError("sweep-gamma needs --gamma-grid")
        if self.dynamics == Dynamics.SECOND and self.gains is None:
            raise ValueError("second-order dynamics require --gains")
        if self.dynamics == Dynamics.FIRST and self.gains is not None:
            raise ValueError("--gains only applies to second-order dynamics")
        if self.dynamics == Dynamics.FIRST and self.output == OutputKind.VELOCITY:
            raise ValueError("velocity output requires second-order dynamics")
        return self
