"""图与 Jordan 分解的输入模式。"""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class WeightedDigraph(BaseModel):
    """Node count plus positively weighted directed edges.

    Edge ``(i, j, w)`` means node ``i`` measures node ``j`` with weight ``w``;
    indices are 1-based as in the graph JSON format. Structural invariants
    (positive weights, no self-loops, no duplicates, indices in range) are
    checked by ``graph.validate_graph`` so they surface as ``InvalidGraph``.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Number of nodes")
    edges: list[tuple[int, int, float]] = Field(
        default_factory=list, description="Directed edges [i, j, weight], 1-based"
    )


FamilyKind = Literal["cycle", "star", "path", "complete"]


class FamilyHint(BaseModel):
    """Names the analytic family a Laplacian was built from."""

    model_config = ConfigDict(frozen=True)

    kind: FamilyKind
    n: int = Field(..., ge=2)
    d: float = Field(default=1.0, gt=0.0, description="Out-degree of the cyclic family")
    omega: int = Field(default=1, ge=1, description="Number of succeeding neighbors measured")


class JordanImport(BaseModel):
    """User-supplied Jordan data, complex numbers as ``[re, im]`` pairs."""

    eigenvalues: list[tuple[float, float]] = Field(..., description="One entry per Jordan block")
    block_sizes: list[int] = Field(..., description="Jordan block sizes, same order")
    R: list[list[tuple[float, float]]] = Field(..., description="n×n generalized eigenvectors")
    label: Optional[str] = Field(default=None, description="Free-form provenance note")
