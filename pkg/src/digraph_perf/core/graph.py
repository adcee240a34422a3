"""加权有向图、Laplacian 矩阵与标准图族。

提供:
    - build_laplacian: 由加权有向图构造 Laplacian（L_ii = Σ_j b_ij，L_ij = −b_ij）
    - 标准图族: 有向环（ω 近邻）、内爆星形、有向路径、完全图
    - hermitian_part: 权重平衡图的 Hermitian 部分（无向对应图）
    - 输出矩阵: 偏离平均值（C_dav）与局部无序
    - 结构检查: 全局可达节点、正规性

内部索引从 0 开始；JSON 与命令行中的节点编号从 1 开始，只在 I/O 边界转换。

使用示例:
    from digraph_perf.core.graph import cyclic_laplacian, deviation_from_average_output

    L = cyclic_laplacian(5, 1.0, 2)
    C = deviation_from_average_output(5)
"""
import json
import logging
from pathlib import Path

import networkx as nx
import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray
from pydantic import ValidationError

from digraph_perf.core.config import settings
from digraph_perf.core.errors import (
    BadOmega,
    BadSize,
    InputParseError,
    InvalidGraph,
    NotWeightBalanced,
    ShapeMismatch,
)
from digraph_perf.schemas.graph import FamilyHint, WeightedDigraph

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]


def _frozen(m: Matrix) -> Matrix:
    m.setflags(write=False)
    return m


def validate_graph(g: WeightedDigraph) -> None:
    """Raise InvalidGraph unless weights are positive, indices in range, edges unique."""
    seen: set[tuple[int, int]] = set()
    for i, j, w in g.edges:
        if not (1 <= i <= g.n and 1 <= j <= g.n):
            raise InvalidGraph(f"edge ({i}, {j}) has an index outside 1..{g.n}")
        if i == j:
            raise InvalidGraph(f"self-loop at node {i}")
        if not (w > 0.0 and np.isfinite(w)):
            raise InvalidGraph(f"edge ({i}, {j}) has non-positive weight {w}")
        if (i, j) in seen:
            raise InvalidGraph(f"duplicate edge ({i}, {j})")
        seen.add((i, j))


def build_laplacian(g: WeightedDigraph) -> Matrix:
    """Laplacian with [L]_ii = Σ_j b_ij and [L]_ij = −b_ij."""
    validate_graph(g)
    L = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        L[i - 1, j - 1] = -w
    L[np.diag_indices(g.n)] = -L.sum(axis=1)
    return _frozen(L)


def validate_laplacian(L: Matrix) -> None:
    """Check square shape, zero row sums and the sign pattern."""
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ShapeMismatch(f"Laplacian must be square, got shape {L.shape}")
    scale = max(1.0, float(np.abs(L).max(initial=0.0)))
    if np.abs(L.sum(axis=1)).max(initial=0.0) > settings.ASSUMPTION_TOL * scale * L.shape[0]:
        raise InvalidGraph("Laplacian rows must sum to zero")
    off = L - np.diag(np.diag(L))
    if (off > settings.ASSUMPTION_TOL * scale).any():
        raise InvalidGraph("Laplacian off-diagonal entries must be nonpositive")


def cyclic_laplacian(n: int, d: float, omega: int) -> Matrix:
    """d·circulant([1, −1/ω (ω times), 0, ...]): each node measures its ω successors."""
    if n < 2:
        raise BadSize(f"cyclic digraph needs n >= 2, got {n}")
    if not 1 <= omega <= n - 1:
        raise BadOmega(f"omega must lie in 1..{n - 1}, got {omega}")
    if d <= 0.0:
        raise InvalidGraph(f"out-degree must be positive, got {d}")
    first_row = np.zeros(n)
    first_row[0] = 1.0
    first_row[1 : omega + 1] = -1.0 / omega
    # scipy's circulant takes the first column
    L = d * la.circulant(first_row).T
    return _frozen(np.ascontiguousarray(L))


def complete_laplacian(n: int) -> Matrix:
    """Uniform complete digraph with edge weights 1/(n−1)."""
    if n < 2:
        raise BadSize(f"complete graph needs n >= 2, got {n}")
    return cyclic_laplacian(n, 1.0, n - 1)


def imploding_star_laplacian(n: int) -> Matrix:
    """(n/(n−1))·[[I, −1], [0ᵀ, 0]]: every node measures the hub (last node)."""
    if n < 2:
        raise BadSize(f"imploding star needs n >= 2, got {n}")
    L = np.zeros((n, n))
    L[: n - 1, : n - 1] = np.eye(n - 1)
    L[: n - 1, n - 1] = -1.0
    return _frozen(L * (n / (n - 1)))


def directed_path_laplacian(n: int) -> Matrix:
    """Node 1 is a root; node i ≥ 2 measures node i−1 with unit weight."""
    if n < 2:
        raise BadSize(f"directed path needs n >= 2, got {n}")
    L = np.eye(n)
    L[0, 0] = 0.0
    L[np.arange(1, n), np.arange(0, n - 1)] = -1.0
    return _frozen(L)


def hermitian_part(L: Matrix) -> Matrix:
    """(L + Lᵀ)/2 of a weight-balanced Laplacian."""
    col_sums = np.abs(L.sum(axis=0))
    if col_sums.max(initial=0.0) > settings.BALANCE_TOL:
        raise NotWeightBalanced(
            f"column sums must vanish for the Hermitian part to be a Laplacian "
            f"(max |column sum| = {col_sums.max():.3e})"
        )
    return _frozen((L + L.T) / 2.0)


def deviation_from_average_output(n: int) -> Matrix:
    """C = I − (1/n)·11ᵀ."""
    if n < 2:
        raise BadSize(f"output matrix needs n >= 2, got {n}")
    return _frozen(np.eye(n) - np.full((n, n), 1.0 / n))


def local_disorder_output(n: int) -> Matrix:
    """Circulant C with rows e_iᵀ − e_{i+1}ᵀ (indices mod n)."""
    if n < 2:
        raise BadSize(f"output matrix needs n >= 2, got {n}")
    C = np.eye(n) - np.roll(np.eye(n), 1, axis=1)
    return _frozen(C)


def to_networkx(g: WeightedDigraph) -> nx.DiGraph:
    """Edge i→j for every measurement of node j by node i (0-based labels)."""
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_weighted_edges_from((i - 1, j - 1, w) for i, j, w in g.edges)
    return G


def digraph_from_laplacian(L: Matrix) -> WeightedDigraph:
    n = L.shape[0]
    scale = max(1.0, float(np.abs(L).max(initial=0.0)))
    edges = [
        (i + 1, j + 1, float(-L[i, j]))
        for i in range(n)
        for j in range(n)
        if i != j and -L[i, j] > settings.ASSUMPTION_TOL * scale
    ]
    return WeightedDigraph(n=n, edges=edges)


def has_globally_reachable_node(g: WeightedDigraph) -> bool:
    """True iff some node is reachable by a directed path from every node.

    Equivalent to the condensation having exactly one sink component.
    """
    condensed = nx.condensation(to_networkx(g))
    sinks = [c for c in condensed.nodes if condensed.out_degree(c) == 0]
    return len(sinks) == 1


def is_normal(L: Matrix, tol: float | None = None) -> bool:
    """‖LLᵀ − LᵀL‖_F ≤ tol·‖L‖_F²."""
    tol = settings.NORMAL_TOL if tol is None else tol
    norm_sq = float(np.linalg.norm(L, "fro")) ** 2
    commutator = float(np.linalg.norm(L @ L.T - L.T @ L, "fro"))
    return commutator <= tol * norm_sq


def parse_family(shorthand: str) -> tuple[Matrix, FamilyHint]:
    """Parse "cycle:n,d,omega", "star:n", "path:n" or "complete:n"."""
    kind, sep, args = shorthand.strip().partition(":")
    if not sep:
        raise InputParseError(f"family shorthand needs 'kind:args', got {shorthand!r}")
    if kind not in ("cycle", "star", "path", "complete"):
        raise InputParseError(f"unknown graph family {kind!r}")
    parts = [p.strip() for p in args.split(",") if p.strip()]
    expected = 3 if kind == "cycle" else 1
    if len(parts) != expected:
        raise InputParseError(f"{kind} expects {expected} argument(s), got {args!r}")
    try:
        n = int(parts[0])
        d = float(parts[1]) if kind == "cycle" else 1.0
        omega = int(parts[2]) if kind == "cycle" else 1
    except ValueError as e:
        raise InputParseError(f"cannot parse family arguments {args!r}: {e}") from e

    if kind == "cycle":
        L = cyclic_laplacian(n, d, omega)
        return L, FamilyHint(kind="cycle", n=n, d=d, omega=omega)
    if kind == "star":
        return imploding_star_laplacian(n), FamilyHint(kind="star", n=n)
    if kind == "path":
        return directed_path_laplacian(n), FamilyHint(kind="path", n=n)
    if kind == "complete":
        return complete_laplacian(n), FamilyHint(kind="cycle", n=n, d=1.0, omega=n - 1)
    raise InputParseError(f"unknown graph family {kind!r}")


def load_graph(path: str | Path) -> WeightedDigraph:
    """Read the graph JSON format {"n": int, "edges": [[i, j, w], ...]}."""
    try:
        text = Path(path).read_text(encoding="utf-8")
        g = WeightedDigraph.model_validate_json(text)
    except (OSError, ValidationError, json.JSONDecodeError) as e:
        raise InputParseError(f"cannot read graph from {path}: {e}") from e
    validate_graph(g)
    logger.debug("loaded graph from %s: n=%d, %d edges", path, g.n, len(g.edges))
    return g


def random_normal_laplacian(n: int, rng: np.random.Generator) -> Matrix:
    """Random convex combination of the cyclic Laplacians L^cyc(n, 1, ω)."""
    weights = rng.dirichlet(np.ones(n - 1))
    L = sum(w * cyclic_laplacian(n, 1.0, omega) for omega, w in enumerate(weights, start=1))
    return _frozen(np.asarray(L, dtype=float))


def random_digraph_laplacian(n: int, rng: np.random.Generator) -> Matrix:
    """Complete digraph with i.i.d. weights in [0.1, 1.1)."""
    B = rng.random((n, n)) + 0.1
    np.fill_diagonal(B, 0.0)
    L = np.diag(B.sum(axis=1)) - B
    return _frozen(L)
