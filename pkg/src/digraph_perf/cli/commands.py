"""子命令处理器。

每个处理器接收已校验的 RunConfig，返回要写出的文本（JSON 或 CSV）以及退出码。
"""
import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from digraph_perf.cli.display import format_csv, format_json
from digraph_perf.core.analysis import (
    compare_directed_undirected,
    gamma_sweep,
    monte_carlo_h2,
    omega_sweep,
    star_vs_complete,
)
from digraph_perf.core.closed_form import performance
from digraph_perf.core.config import settings
from digraph_perf.core.errors import InputParseError
from digraph_perf.core.graph import (
    build_laplacian,
    deviation_from_average_output,
    hermitian_part,
    load_graph,
    local_disorder_output,
    parse_family,
)
from digraph_perf.core.oracle import (
    assemble,
    covariance_response,
    deflate,
    h2_norm,
    l2_response,
    simulate_impulse,
)
from digraph_perf.core.spectral import (
    SpectralData,
    decompose,
    geometric_weights,
    import_jordan_model,
    load_jordan,
)
from digraph_perf.core.stability import check_assumptions
from digraph_perf.schemas import (
    FamilyHint,
    InputSpec,
    OracleReport,
    PerformanceQuery,
    RunConfig,
)

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]

# exit code when the closed form disagrees with the Gramian oracle
ORACLE_MISMATCH_EXIT = 5

AVAILABLE_COMMANDS = [
    "compute",
    "compare",
    "sweep-omega",
    "sweep-gamma",
    "star-complete",
    "oracle-check",
    "monte-carlo",
]

FAMILY_KINDS = ("cycle", "star", "path", "complete")


def _read_json(path: str | Path, what: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputParseError(f"cannot read {what} from {path}: {e}") from e


def load_graph_source(config: RunConfig) -> tuple[Matrix, Optional[FamilyHint]]:
    """--graph as family shorthand or graph JSON path."""
    assert config.graph is not None
    kind = config.graph.partition(":")[0]
    if kind in FAMILY_KINDS:
        return parse_family(config.graph)
    return build_laplacian(load_graph(config.graph)), None


def load_output_matrix(source: str, n: int) -> Matrix:
    if source == "dav":
        return deviation_from_average_output(n)
    if source == "local":
        return local_disorder_output(n)
    C = np.array(_read_json(source, "output matrix"), dtype=float)
    if C.ndim != 2 or C.shape[1] != n:
        raise InputParseError(f"output matrix must have {n} columns, got shape {C.shape}")
    return C


def load_input_spec(source: str) -> InputSpec:
    if source == "identity":
        return InputSpec.identity()
    kind, sep, path = source.partition(":")
    if not sep or kind not in ("w0", "sigma0"):
        raise InputParseError(f"--input expects identity, w0:FILE or sigma0:FILE, got {source!r}")
    data = _read_json(path, kind)
    if kind == "w0":
        return InputSpec.deterministic(data)
    return InputSpec.covariance(data)


def _decomposition(config: RunConfig, L: Matrix, hint: Optional[FamilyHint]) -> SpectralData:
    if config.jordan is not None:
        return import_jordan_model(L, load_jordan(config.jordan))
    return decompose(L, hint)


def _query(config: RunConfig, C: Matrix) -> PerformanceQuery:
    query = PerformanceQuery(
        dynamics=config.dynamics,
        output=config.output,
        C=C,
        gains=config.gains,
        input=load_input_spec(config.input),
    )
    check_assumptions(config.gains, C)
    return query


def _graph_query(config: RunConfig) -> tuple[Matrix, Optional[FamilyHint], PerformanceQuery]:
    L, hint = load_graph_source(config)
    return L, hint, _query(config, load_output_matrix(config.C, L.shape[0]))


def handle_compute(config: RunConfig) -> tuple[str, int]:
    L, hint, query = _graph_query(config)
    S = _decomposition(config, L, hint)
    return format_json(performance(L, S, query)), 0


def handle_compare(config: RunConfig) -> tuple[str, int]:
    L, hint, query = _graph_query(config)
    return format_json(compare_directed_undirected(L, query, hint)), 0


def handle_sweep_omega(config: RunConfig) -> tuple[str, int]:
    assert config.n is not None
    C = load_output_matrix(config.C, config.n)
    check_assumptions(config.gains, C)
    rows = omega_sweep(config.n, config.gains, config.dynamics, config.output, C)
    return format_csv(
        ["omega", "performance", "stable"], ((r.omega, r.performance, r.stable) for r in rows)
    ), 0


def handle_sweep_gamma(config: RunConfig) -> tuple[str, int]:
    L, hint, query = _graph_query(config)
    gains = query.require_gains()
    assert config.gamma_grid is not None
    start, stop, num = config.gamma_grid
    rows = gamma_sweep(
        L,
        hermitian_part(L),
        gains.k_p,
        gains.k_d,
        gains.gamma_d,
        np.linspace(start, stop, num).tolist(),
        config.output,
        query.C,
        hint,
    )
    return format_csv(
        ["gamma_p", "p_directed", "p_undirected"],
        ((r.gamma_p, r.p_directed, r.p_undirected) for r in rows),
    ), 0


def handle_star_complete(config: RunConfig) -> tuple[str, int]:
    assert config.n_range is not None
    lo, hi = config.n_range
    if config.gains is not None:
        check_assumptions(config.gains, deviation_from_average_output(max(lo, 2)))
    rows = star_vs_complete(range(lo, hi + 1), config.gains, config.dynamics, config.output)
    return format_csv(
        ["n", "p_star", "p_complete", "abs_diff"],
        ((r.n, r.p_star, r.p_complete, r.abs_diff) for r in rows),
    ), 0


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def _impulse_directions(spec: InputSpec, n: int) -> Matrix:
    """Columns W with W Wᵀ = Σ₀."""
    if spec.kind == "identity":
        return np.eye(n)
    if spec.kind == "deterministic":
        return np.asarray(spec.w0, dtype=float).reshape(-1, 1)
    evals, evecs = np.linalg.eigh(spec.sigma(n))
    return evecs * np.sqrt(np.clip(evals, 0.0, None))


def oracle_check(config: RunConfig) -> OracleReport:
    """Closed form against the Gramian and RK4 oracles on the same query."""
    L, hint, query = _graph_query(config)
    S = _decomposition(config, L, hint)
    W = geometric_weights(query.C, S)
    closed = performance(L, S, query, W).value

    ss = assemble(L, query.gains, query.dynamics, query.output, query.C)
    d = deflate(ss, S, W.observable)
    spec = query.input
    if spec.kind == "identity":
        gramian = h2_norm(d)
    elif spec.kind == "deterministic":
        assert spec.w0 is not None
        gramian = l2_response(d, spec.w0)
    else:
        gramian = covariance_response(d, spec.sigma(S.n))
    rk4 = simulate_impulse(ss, _impulse_directions(spec, S.n))

    rel_cg = _relative(closed, gramian)
    return OracleReport(
        closed_form=closed,
        gramian=gramian,
        rk4=rk4,
        rel_closed_vs_gramian=rel_cg,
        rel_closed_vs_rk4=_relative(closed, rk4),
        rel_gramian_vs_rk4=_relative(gramian, rk4),
        passed=rel_cg <= settings.ORACLE_RTOL,
    )


def handle_oracle_check(config: RunConfig) -> tuple[str, int]:
    report = oracle_check(config)
    if not report.passed:
        logger.warning("closed form and Gramian disagree: %.3e", report.rel_closed_vs_gramian)
    return format_json(report), 0 if report.passed else ORACLE_MISMATCH_EXIT


def handle_monte_carlo(config: RunConfig) -> tuple[str, int]:
    L, hint, query = _graph_query(config)
    S = _decomposition(config, L, hint)
    W = geometric_weights(query.C, S)
    rng = np.random.default_rng(config.seed)
    return format_json(monte_carlo_h2(S, W, query, config.samples, rng)), 0


HANDLERS: dict[str, Callable[[RunConfig], tuple[str, int]]] = {
    "compute": handle_compute,
    "compare": handle_compare,
    "sweep-omega": handle_sweep_omega,
    "sweep-gamma": handle_sweep_gamma,
    "star-complete": handle_star_complete,
    "oracle-check": handle_oracle_check,
    "monte-carlo": handle_monte_carlo,
}


def run(config: RunConfig) -> tuple[str, int]:
    """Dispatch one command; domain errors propagate to the caller."""
    logger.debug("running %s", config.command)
    return HANDLERS[config.command](config)

