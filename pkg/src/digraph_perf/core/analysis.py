"""有向与无向网络的比较实验.

    - compare_directed_undirected: 正规 Laplacian 与其 Hermitian 部分的性能比较，
      并给出由特征值数据推出的理论预测
    - gamma_p_thresholds / gamma_sweep: 相对位置反馈 γ_p 的阈值区间与扫描曲线
    - omega_sweep / argmin_omega: ω 近邻有向环的性能随 ω 的变化
    - star_vs_complete: 内爆星形与完全图在 P_dav 下性能相同
    - monte_carlo_h2: 随机脉冲方向的 L2 均值收敛到 H2 范数平方

使用示例:
    from digraph_perf.core.analysis import omega_sweep, argmin_omega
    from digraph_perf.schemas import Dynamics, OutputKind

    rows = omega_sweep(51, None, Dynamics.FIRST, OutputKind.POSITION)
    print(argmin_omega(rows))  # 25
"""
import logging
import math
from collections.abc import Iterable, Sequence
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from digraph_perf.core import errors
from digraph_perf.core.closed_form import performance, response_matrix
from digraph_perf.core.config import settings
from digraph_perf.core.errors import (
    AssumptionViolated,
    NoComplexObservableMode,
    NotNormal,
    Unstable,
)
from digraph_perf.core.graph import (
    complete_laplacian,
    cyclic_laplacian,
    deviation_from_average_output,
    hermitian_part,
    imploding_star_laplacian,
    is_normal,
)
from digraph_perf.core.spectral import (
    GeometricWeights,
    SpectralData,
    decompose,
    geometric_weights,
)
from digraph_perf.core.sweep_executor import SweepExecutor
from digraph_perf.schemas.graph import FamilyHint
from digraph_perf.schemas.query import (
    Dynamics,
    GainSet,
    OutputKind,
    PerformanceQuery,
)
from digraph_perf.schemas.report import (
    ComparisonReport,
    GammaRow,
    MonteCarloReport,
    OmegaRow,
    Prediction,
    Relation,
    StarCompleteRow,
    ThresholdReport,
)

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]


def _is_complex(lam: complex) -> bool:
    return abs(lam.imag) > 1e-9 * (1.0 + abs(lam))


def relation_of(p_directed: float, p_undirected: float) -> Relation:
    finite = [v for v in (p_directed, p_undirected) if math.isfinite(v)]
    band = settings.COMPARE_TOL * (1.0 + max(finite, default=0.0))
    if p_directed < p_undirected - band:
        return Relation.LESS
    if p_directed > p_undirected + band:
        return Relation.GREATER
    return Relation.EQUAL


def predict_relation(
    eigenvalues: Sequence[complex], observable: Iterable[int], query: PerformanceQuery
) -> tuple[Prediction, str]:
    """Directed-vs-undirected relation implied by the observable eigenvalues alone."""
    if query.input.kind != "identity":
        return Prediction.INDETERMINATE, "predictions cover identity input covariance only"
    if query.dynamics == Dynamics.FIRST:
        return Prediction.EQUAL, "single integrator: normal digraph equals its Hermitian part"

    gains = query.require_gains()
    complex_modes = [k for k in observable if _is_complex(complex(eigenvalues[k - 1]))]
    if gains.gamma_p == 0.0:
        return Prediction.EQUAL, "no relative position feedback"
    if not complex_modes:
        return Prediction.EQUAL, "no observable complex eigenvalue"

    if query.output == OutputKind.VELOCITY:
        return Prediction.GREATER, "velocity output with relative position feedback"

    tol = 1e-12 * (1.0 + gains.gamma_p)
    signs = []
    for k in complex_modes:
        phi = gains.k_d + gains.gamma_d * complex(eigenvalues[k - 1]).real
        s = gains.gamma_d * phi - gains.gamma_p
        signs.append(0 if abs(s) <= tol else (1 if s > 0 else -1))
    if all(s == 0 for s in signs):
        return Prediction.EQUAL, "γ_d·φ_k = γ_p on every complex mode"
    if all(s >= 0 for s in signs):
        return Prediction.LESS, "γ_d·φ_k ≥ γ_p on every complex mode"
    if all(s <= 0 for s in signs):
        return Prediction.GREATER, "γ_d·φ_k ≤ γ_p on every complex mode"
    return Prediction.INDETERMINATE, "sign of γ_d·φ_k − γ_p is mixed across modes"


def _metric_or_inf(
    L: Matrix, S: SpectralData, W: GeometricWeights, query: PerformanceQuery
) -> float:
    try:
        return performance(L, S, query, W).value
    except Unstable:
        return math.inf


def compare_directed_undirected(
    L: Matrix, query: PerformanceQuery, hint: Optional[FamilyHint] = None
) -> ComparisonReport:
    """P for a normal digraph against P′ for its Hermitian part.

    Raises:
        NotNormal: L is not normal
    """
    if not is_normal(L):
        raise NotNormal("directed/undirected comparison needs a normal Laplacian")
    S = decompose(L, hint)
    W = geometric_weights(query.C, S)
    prediction, reason = predict_relation(S.eigenvalues, W.observable, query)

    L_sym = hermitian_part(L)
    p_directed = performance(L, S, query, W).value
    p_undirected = performance(L_sym, decompose(L_sym), query).value
    report = ComparisonReport(
        p_directed=p_directed,
        p_undirected=p_undirected,
        relation=relation_of(p_directed, p_undirected),
        theorem_prediction=prediction,
        reason=reason,
    )
    if not report.consistent:
        logger.warning(
            "relation %s contradicts prediction %s (%s)",
            report.relation.value,
            prediction.value,
            reason,
        )
    return report


class _GammaProblem:
    """Directed and undirected decompositions shared across a γ_p scan."""

    def __init__(
        self,
        L: Matrix,
        L_sym: Matrix,
        base: PerformanceQuery,
        hint: Optional[FamilyHint] = None,
    ) -> None:
        self.L = L
        self.L_sym = L_sym
        self.base = base
        self.S = decompose(L, hint)
        self.W = geometric_weights(base.C, self.S)
        self.S_sym = decompose(L_sym)
        self.W_sym = geometric_weights(base.C, self.S_sym)

    def query(self, gamma_p: float) -> PerformanceQuery:
        gains = self.base.require_gains().with_gamma_p(gamma_p)
        return self.base.model_copy(update={"gains": gains})

    def values(self, gamma_p: float) -> tuple[float, float]:
        q = self.query(gamma_p)
        return (
            _metric_or_inf(self.L, self.S, self.W, q),
            _metric_or_inf(self.L_sym, self.S_sym, self.W_sym, q),
        )

    def difference(self, gamma_p: float) -> float:
        directed, undirected = self.values(gamma_p)
        return directed - undirected


def _second_order_query(
    k_p: float, k_d: float, gamma_d: float, C: Matrix, output: OutputKind
) -> PerformanceQuery:
    return PerformanceQuery(
        dynamics=Dynamics.SECOND,
        output=output,
        C=C,
        gains=GainSet(k_p=k_p, k_d=k_d, gamma_p=0.0, gamma_d=gamma_d),
    )


def gamma_p_thresholds(
    L: Matrix,
    k_p: float,
    k_d: float,
    gamma_d: float,
    C: Matrix,
    hint: Optional[FamilyHint] = None,
    grid_points: int = 41,
) -> ThresholdReport:
    """Bracket [γ_l, γ_u] of the position-output crossover and the sign changes inside it.

    A directed system that loses stability counts as P = +∞.
    """
    if gamma_d <= 0.0:
        raise AssumptionViolated("the γ_p threshold needs relative velocity feedback γ_d > 0")
    if not is_normal(L):
        raise NotNormal("γ_p thresholds need a normal Laplacian")
    problem = _GammaProblem(
        L, hermitian_part(L), _second_order_query(k_p, k_d, gamma_d, C, OutputKind.POSITION), hint
    )
    complex_modes = [k for k in problem.W.observable if _is_complex(problem.S.eigenvalues[k - 1])]
    if not complex_modes:
        raise NoComplexObservableMode("no observable eigenvalue with nonzero imaginary part")
    bounds = [gamma_d * (k_d + gamma_d * problem.S.eigenvalues[k - 1].real) for k in complex_modes]
    gamma_l, gamma_u = min(bounds), max(bounds)

    grid = np.linspace(gamma_l, gamma_u, max(grid_points, 2))
    diffs = [problem.difference(float(g)) for g in grid]
    crossings = []
    for left, right, d_left, d_right in zip(grid[:-1], grid[1:], diffs[:-1], diffs[1:], strict=True):
        if (d_left > 0) == (d_right > 0):
            continue
        lo, hi, d_lo = float(left), float(right), d_left
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            d_mid = problem.difference(mid)
            if (d_mid > 0) == (d_lo > 0):
                lo, d_lo = mid, d_mid
            else:
                hi = mid
        crossings.append(0.5 * (lo + hi))
    logger.info("γ_p bracket [%.6g, %.6g] with %d crossing(s)", gamma_l, gamma_u, len(crossings))
    return ThresholdReport(gamma_l=gamma_l, gamma_u=gamma_u, crossings=crossings)


def gamma_sweep(
    L: Matrix,
    L_prime: Matrix,
    k_p: float,
    k_d: float,
    gamma_d: float,
    gamma_p_grid: Sequence[float],
    output: OutputKind,
    C: Matrix,
    hint: Optional[FamilyHint] = None,
    executor: Optional[SweepExecutor] = None,
) -> list[GammaRow]:
    """(γ_p, P, P′) rows; an unstable directed point reports P = +∞ and stable = False."""
    problem = _GammaProblem(L, L_prime, _second_order_query(k_p, k_d, gamma_d, C, output), hint)
    executor = executor or SweepExecutor()
    results = executor.run_batch(
        [(i, problem.values, {"gamma_p": float(g)}) for i, g in enumerate(gamma_p_grid)]
    )
    rows = []
    for r in results:
        if not r.success:
            _raise_row_error(r.error)
        directed, undirected = r.value
        rows.append(
            GammaRow(
                gamma_p=r.arguments["gamma_p"],
                p_directed=directed,
                p_undirected=undirected,
                stable=math.isfinite(directed),
            )
        )
    return rows


def _raise_row_error(error: Optional[dict]) -> None:
    """Re-raise a row failure that the sweep does not record per row."""
    assert error is not None
    cls = getattr(errors, error["error"], errors.DigraphPerfError)
    raise cls(error["message"])


def _omega_row(
    n: int, omega: int, gains: Optional[GainSet], dynamics: Dynamics, output: OutputKind, C: Matrix
) -> float:
    L = cyclic_laplacian(n, 1.0, omega)
    S = decompose(L, FamilyHint(kind="cycle", n=n, d=1.0, omega=omega))
    query = PerformanceQuery(dynamics=dynamics, output=output, C=C, gains=gains)
    return performance(L, S, query).value


def omega_sweep(
    n: int,
    gains: Optional[GainSet],
    dynamics: Dynamics,
    output: OutputKind,
    C: Optional[Matrix] = None,
    executor: Optional[SweepExecutor] = None,
) -> list[OmegaRow]:
    """Identity-covariance metric of L^cyc(n, 1, ω) for ω = 1..n−1."""
    C = deviation_from_average_output(n) if C is None else C
    executor = executor or SweepExecutor()
    calls = [
        (
            omega,
            _omega_row,
            {"n": n, "omega": omega, "gains": gains, "dynamics": dynamics, "output": output, "C": C},
        )
        for omega in range(1, n)
    ]
    rows = []
    for r in executor.run_batch(calls):
        if r.success:
            rows.append(OmegaRow(omega=r.index, performance=r.value, stable=True))
        elif r.error is not None and r.error["exit_code"] == Unstable.exit_code:
            rows.append(OmegaRow(omega=r.index, performance=math.inf, stable=False))
        else:
            _raise_row_error(r.error)
    return rows


def argmin_omega(rows: Sequence[OmegaRow]) -> int:
    """ω of the best stable row; near-ties go to the smallest ω."""
    stable = [r for r in rows if r.stable]
    if not stable:
        raise Unstable("no stable ω in the sweep")
    best = min(r.performance for r in stable)
    band = 1e-9 * max(abs(best), 1e-300)
    return min(r.omega for r in stable if r.performance <= best + band)


def _star_complete_row(
    n: int, gains: Optional[GainSet], dynamics: Dynamics, output: OutputKind
) -> tuple[float, float]:
    query = PerformanceQuery(
        dynamics=dynamics, output=output, C=deviation_from_average_output(n), gains=gains
    )
    L_star = imploding_star_laplacian(n)
    p_star = performance(L_star, decompose(L_star, FamilyHint(kind="star", n=n)), query).value
    L_complete = complete_laplacian(n)
    p_complete = performance(
        L_complete,
        decompose(L_complete, FamilyHint(kind="complete", n=n)),
        query,
    ).value
    return p_star, p_complete


def star_vs_complete(
    n_range: Iterable[int],
    gains: Optional[GainSet],
    dynamics: Dynamics,
    output: OutputKind,
    executor: Optional[SweepExecutor] = None,
) -> list[StarCompleteRow]:
    """P_dav of the imploding star and the complete graph for each n."""
    executor = executor or SweepExecutor()
    calls = [
        (n, _star_complete_row, {"n": n, "gains": gains, "dynamics": dynamics, "output": output})
        for n in n_range
    ]
    rows = []
    for r in executor.run_batch(calls):
        if not r.success:
            _raise_row_error(r.error)
        row = StarCompleteRow(n=r.index, p_star=r.value[0], p_complete=r.value[1])
        if row.abs_diff > 1e-10 * max(abs(row.p_star), abs(row.p_complete), 1e-300):
            logger.warning("star and complete differ at n=%d by %.3e", row.n, row.abs_diff)
        rows.append(row)
    return rows


def monte_carlo_h2(
    S: SpectralData,
    W: GeometricWeights,
    query: PerformanceQuery,
    samples: int,
    rng: np.random.Generator,
) -> MonteCarloReport:
    """Mean L2 response over w₀ ~ N(0, I) next to the identity-covariance value."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    G = response_matrix(S, W, query)
    draws = rng.standard_normal((S.n, samples))
    values = np.einsum("is,ij,js->s", draws, G, draws).real
    return MonteCarloReport(
        mean=float(values.mean()),
        standard_error=float(values.std(ddof=1) / math.sqrt(samples)),
        h2=float(np.trace(G).real),
        samples=samples,
    )
