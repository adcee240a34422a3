"""闭式性能指标 P = tr(Σ_Q Ψ).

Ψ 的每个块由 Jordan 块脉冲响应 h̃_pq 的 L2 内积组成。h̃_pq 只依赖 σ = q − p + 1，
且总是形如 Σ c·t^m e^{ρt}/m! 的指数多项式，因此内积有统一的闭式:
    ∫₀^∞ conj(a t^i e^{ρ_a t}/i!)·b t^j e^{ρ_b t}/j! dt
        = conj(a)·b·(i+j)!/(i!j!) / (−(conj ρ_a + ρ_b))^{i+j+1}

计算路径:
    - normal: R 为酉矩阵、单位协方差，只需对角项（h2_normal）
    - diagonalizable: 标量 Jordan 块，核矩阵向量化计算
    - jordan: 一般 Jordan 块，按块对缓存 σ、υ 核

二阶部分分式在特征根接近重合时系数按 1/(ρ₁−ρ₂)^{2σ−1} 增长，项之间相互抵消。
当 Σ|项| 超过 CANCELLATION_MAX·|和| 时，该块对改由 2δ 维块实现的交叉 Gramian
(Sylvester 方程) 计算。

使用示例:
    from digraph_perf.core.closed_form import performance
    from digraph_perf.core.graph import deviation_from_average_output, imploding_star_laplacian
    from digraph_perf.core.spectral import decompose
    from digraph_perf.schemas import FamilyHint, PerformanceQuery

    L = imploding_star_laplacian(5)
    S = decompose(L, FamilyHint(kind="star", n=5))
    result = performance(L, S, PerformanceQuery(C=deviation_from_average_output(5)))
    print(result.value)  # 1.6
"""
import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray

from digraph_perf.core.config import settings
from digraph_perf.core.errors import (
    AssumptionViolated,
    BadSize,
    BlockTooLarge,
    DecompositionError,
    DivergentIntegral,
    NotNormal,
    ShapeMismatch,
    Unstable,
)
from digraph_perf.core.partial_fractions import (
    FACTORIALS,
    pf_coefficients_distinct,
    pf_coefficients_repeated,
)
from digraph_perf.core.spectral import (
    GeometricWeights,
    SpectralData,
    geometric_weights,
    jordan_matrix,
    sigma_q,
)
from digraph_perf.core.stability import (
    ModeCoefficients,
    char_roots,
    check_assumptions,
    unstable_modes,
)
from digraph_perf.schemas.query import (
    Dynamics,
    GainSet,
    OutputKind,
    PerformanceQuery,
    PerformanceResult,
)

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]


@dataclass(frozen=True)
class ExpTerm:
    """coef · t^power · e^{rho t} / power!"""

    coef: complex
    rho: complex
    power: int


def _first_order_expansion(
    lam: complex, gains: Optional[GainSet], output: OutputKind, sigma: int
) -> tuple[ExpTerm, ...]:
    return (ExpTerm((-1.0) ** (sigma - 1), -lam, sigma - 1),)


def _second_order_expansion(
    lam: complex, gains: Optional[GainSet], output: OutputKind, sigma: int
) -> tuple[ExpTerm, ...]:
    assert gains is not None
    roots = char_roots(lam, gains)
    sign = (-1.0) ** (sigma - 1)
    if roots.repeated:
        c = pf_coefficients_repeated(lam, gains, sigma, output, roots)
        return tuple(
            ExpTerm(sign * c[l - 1], roots.rho1, 2 * sigma - l)
            for l in range(1, 2 * sigma + 1)
            if c[l - 1] != 0
        )
    c = pf_coefficients_distinct(lam, gains, sigma, output, roots)
    terms = []
    for l in range(1, sigma + 1):
        terms.append(ExpTerm(sign * c[l - 1], roots.rho1, sigma - l))
        terms.append(ExpTerm(sign * c[l + sigma - 1], roots.rho2, sigma - l))
    return tuple(terms)


ModeExpansion = Callable[[complex, Optional[GainSet], OutputKind, int], tuple[ExpTerm, ...]]

# h̃_pq of a Jordan block per network model; further dynamics register here
MODE_EXPANSIONS: dict[Dynamics, ModeExpansion] = {
    Dynamics.FIRST: _first_order_expansion,
    Dynamics.SECOND: _second_order_expansion,
}


def mode_expansion(
    dynamics: Dynamics,
    lam: complex,
    gains: Optional[GainSet],
    output: OutputKind,
    sigma: int,
) -> tuple[ExpTerm, ...]:
    """Exponential-polynomial terms of h̃_pq for σ = q − p + 1."""
    return MODE_EXPANSIONS[dynamics](complex(lam), gains, output, sigma)


def _inner_product_terms(
    left: tuple[ExpTerm, ...], right: tuple[ExpTerm, ...]
) -> tuple[complex, float]:
    """Sum and absolute sum of the pairwise terms of ∫₀^∞ conj(f)·g dt."""
    total = 0j
    magnitude = 0.0
    for a in left:
        for b in right:
            decay = -(np.conj(a.rho) + b.rho)
            if decay.real <= 0.0:
                raise DivergentIntegral(f"exponent {-decay} has nonnegative real part")
            m = a.power + b.power
            weight = FACTORIALS[m] / (FACTORIALS[a.power] * FACTORIALS[b.power])
            term = np.conj(a.coef) * b.coef * weight / decay ** (m + 1)
            total += term
            magnitude += abs(term)
    return complex(total), magnitude


def inner_product(left: tuple[ExpTerm, ...], right: tuple[ExpTerm, ...]) -> complex:
    """∫₀^∞ conj(f(t))·g(t) dt for two exponential polynomials."""
    return _inner_product_terms(left, right)[0]


def _cancels(
    total: complex | CMatrix, magnitude: float | NDArray[np.float64]
) -> NDArray[np.bool_]:
    return np.asarray(magnitude) > settings.CANCELLATION_MAX * np.abs(total)


def _mode_block_realization(
    lam: complex, size: int, gains: GainSet, output: OutputKind
) -> tuple[CMatrix, CMatrix, CMatrix]:
    """(A, B, c) of ẍ = −(k_p + γ_p J)x − (k_d + γ_d J)ẋ + w on one Jordan block.

    Entry σ−1 of c·e^{At}·B is h̃_σ.
    """
    J = jordan_matrix((complex(lam),), (size,))
    eye = np.eye(size)
    A = np.block(
        [
            [np.zeros((size, size)), eye],
            [-gains.k_p * eye - gains.gamma_p * J, -gains.k_d * eye - gains.gamma_d * J],
        ]
    ).astype(complex)
    B = np.vstack([np.zeros((size, size)), eye]).astype(complex)
    c = np.zeros((1, 2 * size), dtype=complex)
    c[0, 0 if output == OutputKind.POSITION else size] = 1.0
    return A, B, c


def block_cross_gramian(
    lam_k: complex,
    n_k: int,
    lam_l: complex,
    n_l: int,
    gains: GainSet,
    output: OutputKind,
) -> CMatrix:
    """K[σ−1, υ−1] = ⟨h̃_σ^(k), h̃_υ^(l)⟩ from B_k*XB_l with A_k*X + XA_l = −c_k*c_l.

    Free of the partial-fraction cancellation near repeated characteristic roots.
    """
    Ak, Bk, ck = _mode_block_realization(lam_k, n_k, gains, output)
    Al, Bl, cl = _mode_block_realization(lam_l, n_l, gains, output)
    X = la.solve_sylvester(Ak.conj().T, Al, -(ck.conj().T @ cl))
    return Bk.conj().T @ X @ Bl


def _check_block_indices(p: int, q: int, a: int, b: int) -> None:
    if not (1 <= p <= q and 1 <= a <= b):
        raise ValueError(f"block indices need 1 ≤ p ≤ q and 1 ≤ a ≤ b, got {(p, q, a, b)}")


def scalar_product_first_order(
    lam_k: complex, lam_l: complex, p: int, q: int, a: int, b: int
) -> complex:
    """⟨h̃_pq^(k), h̃_ab^(l)⟩ for single-integrator Jordan blocks.

    Returns:
        (−1)^m Φ / (λ̄_k + λ_l)^{m+1} with m = (b−a) + (q−p)
    """
    _check_block_indices(p, q, a, b)
    total = np.conj(lam_k) + lam_l
    if total.real <= 0.0:
        raise DivergentIntegral(f"Re(λ̄_k + λ_l) = {total.real:.3e} is not positive")
    m = (b - a) + (q - p)
    phi = FACTORIALS[m] / (FACTORIALS[b - a] * FACTORIALS[q - p])
    return complex((-1.0) ** m * phi / total ** (m + 1))


def scalar_product_second_order(
    lam_k: complex,
    lam_l: complex,
    gains: GainSet,
    output: OutputKind,
    p: int,
    q: int,
    a: int,
    b: int,
) -> complex:
    """⟨h̃_pq^(k), h̃_ab^(l)⟩ for double-integrator Jordan blocks.

    Covers the distinct/distinct, distinct/repeated and repeated/repeated root cases
    through the partial-fraction terms of each mode, falling back to the block
    cross Gramian when those terms cancel.
    """
    _check_block_indices(p, q, a, b)
    sigma, upsilon = q - p + 1, b - a + 1
    left = mode_expansion(Dynamics.SECOND, lam_k, gains, output, sigma)
    right = mode_expansion(Dynamics.SECOND, lam_l, gains, output, upsilon)
    total, magnitude = _inner_product_terms(left, right)
    if _cancels(total, magnitude):
        K = block_cross_gramian(lam_k, sigma, lam_l, upsilon, gains, output)
        return complex(K[-1, -1])
    return total


def root_case(lam_k: complex, lam_l: complex, gains: GainSet) -> str:
    def tag(lam: complex) -> str:
        return "repeated" if char_roots(complex(lam), gains).repeated else "distinct"

    return f"{tag(lam_k)}/{tag(lam_l)}"


def psi_diag_diagonalizable_first(lam_k: complex, lam_l: complex) -> complex:
    re_sum = lam_k.real + lam_l.real
    im_diff = lam_k.imag - lam_l.imag
    if re_sum <= 0.0:
        raise DivergentIntegral(f"Re λ_k + Re λ_l = {re_sum:.3e} is not positive")
    return complex(re_sum, im_diff) / (re_sum**2 + im_diff**2)


def psi_kk_second_order(lam: complex, gains: GainSet, output: OutputKind) -> float:
    """Diagonal Ψ_kk of a scalar double-integrator mode from α, φ, β, ξ."""
    mc = ModeCoefficients.of(complex(lam), gains)
    if not mc.stable:
        raise Unstable(f"mode λ={lam} fails the Routh–Hurwitz test")
    if output == OutputKind.POSITION:
        return mc.phi / (2.0 * mc.hurwitz)
    return (mc.xi * mc.beta + mc.phi * mc.alpha) / (2.0 * mc.hurwitz)


def psi_cross_real_eigen(
    lam_k: float, lam_l: float, gains: GainSet, output: OutputKind
) -> float:
    """Cross term Ψ_kl for two real eigenvalues."""
    k = ModeCoefficients.of(complex(lam_k), gains)
    l = ModeCoefficients.of(complex(lam_l), gains)
    if k.beta != 0.0 or l.beta != 0.0 or k.xi != 0.0 or l.xi != 0.0:
        raise AssumptionViolated("psi_cross_real_eigen needs real eigenvalues")
    if not (k.stable and l.stable):
        raise Unstable(f"mode pair ({lam_k}, {lam_l}) is not stable")
    cross = k.phi * l.alpha + l.phi * k.alpha
    denom = (k.alpha - l.alpha) ** 2 + (k.phi + l.phi) * cross
    if output == OutputKind.POSITION:
        return (k.phi + l.phi) / denom
    return cross / denom


def _observable_columns(S: SpectralData, observable: tuple[int, ...]) -> NDArray[np.int64]:
    """0-based indices into the columns of R̃ for the given blocks."""
    cols = [np.arange(S.block_columns(k).start, S.block_columns(k).stop) - 1 for k in observable]
    return np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)


def _scalar_kernel(
    S: SpectralData, observable: tuple[int, ...], query: PerformanceQuery
) -> tuple[CMatrix, set[int]]:
    """K_kl = ⟨h^(k), h^(l)⟩ over observable scalar modes, vectorized.

    Returns:
        (K, blocks whose entries were recomputed through block_cross_gramian)
    """
    expansions = [
        mode_expansion(query.dynamics, S.eigenvalues[k - 1], query.gains, query.output, 1)
        for k in observable
    ]
    width = max((len(e) for e in expansions), default=1)
    m = len(expansions)
    coef = np.zeros((m, width), dtype=complex)
    rho = np.full((m, width), -1.0 + 0j)
    power = np.zeros((m, width), dtype=np.int64)
    for i, terms in enumerate(expansions):
        for j, term in enumerate(terms):
            coef[i, j], rho[i, j], power[i, j] = term.coef, term.rho, term.power

    K = np.zeros((m, m), dtype=complex)
    magnitude = np.zeros((m, m))
    for i in range(width):
        for j in range(width):
            decay = -(np.conj(rho[:, i])[:, None] + rho[None, :, j])
            if (decay.real <= 0.0).any():
                raise DivergentIntegral("an observable mode pair has a non-decaying exponent")
            total_power = power[:, i][:, None] + power[None, :, j]
            weight = FACTORIALS[total_power] / (
                FACTORIALS[power[:, i]][:, None] * FACTORIALS[power[:, j]][None, :]
            )
            term = np.conj(coef[:, i])[:, None] * coef[None, :, j] * weight / decay ** (
                total_power + 1
            )
            K += term
            magnitude += np.abs(term)

    rerouted: set[int] = set()
    if query.dynamics != Dynamics.SECOND:
        return K, rerouted
    gains = query.require_gains()
    for i, j in zip(*np.nonzero(_cancels(K, magnitude)), strict=True):
        lam_i = S.eigenvalues[observable[i] - 1]
        lam_j = S.eigenvalues[observable[j] - 1]
        K[i, j] = block_cross_gramian(lam_i, 1, lam_j, 1, gains, query.output)[0, 0]
        rerouted.update((observable[i], observable[j]))
    return K, rerouted


def _block_kernel(
    lam_k: complex, n_k: int, lam_l: complex, n_l: int, query: PerformanceQuery
) -> tuple[CMatrix, bool]:
    """K[σ−1, υ−1] = ⟨h̃_σ^(k), h̃_υ^(l)⟩ for σ ≤ n_k, υ ≤ n_l.

    The flag is set when the pair went through block_cross_gramian.
    """
    left = [
        mode_expansion(query.dynamics, lam_k, query.gains, query.output, s)
        for s in range(1, n_k + 1)
    ]
    right = [
        mode_expansion(query.dynamics, lam_l, query.gains, query.output, u)
        for u in range(1, n_l + 1)
    ]
    pairs = [[_inner_product_terms(a, b) for b in right] for a in left]
    K = np.array([[total for total, _ in row] for row in pairs], dtype=complex)
    magnitude = np.array([[mag for _, mag in row] for row in pairs])
    if query.dynamics == Dynamics.SECOND and _cancels(K, magnitude).any():
        gains = query.require_gains()
        return block_cross_gramian(lam_k, n_k, lam_l, n_l, gains, query.output), True
    return K, False


def _assemble_psi(
    S: SpectralData, W: GeometricWeights, query: PerformanceQuery
) -> tuple[CMatrix, list[int]]:
    n1 = S.n - 1
    psi = np.zeros((n1, n1), dtype=complex)
    observable = W.observable
    if not observable:
        return psi, []

    if all(S.block_sizes[k - 1] == 1 for k in observable):
        cols = _observable_columns(S, observable)
        K, rerouted = _scalar_kernel(S, observable, query)
        psi[np.ix_(cols, cols)] = W.nu[np.ix_(cols, cols)] * K
        return (psi + psi.conj().T) / 2.0, sorted(rerouted)

    rerouted = set()
    for k in observable:
        ck = np.arange(S.block_columns(k).start, S.block_columns(k).stop) - 1
        for l in observable:
            cl = np.arange(S.block_columns(l).start, S.block_columns(l).stop) - 1
            K, crossed = _block_kernel(
                S.eigenvalues[k - 1], len(ck), S.eigenvalues[l - 1], len(cl), query
            )
            if crossed:
                rerouted.update((k, l))
            nu = W.nu[np.ix_(ck, cl)]
            block = np.zeros((len(ck), len(cl)), dtype=complex)
            for q in range(len(ck)):
                for b in range(len(cl)):
                    block[q, b] = np.sum(nu[: q + 1, : b + 1] * K[q::-1, b::-1])
            psi[np.ix_(ck, cl)] = block
    return (psi + psi.conj().T) / 2.0, sorted(rerouted)


def assemble_psi(
    S: SpectralData, W: GeometricWeights, query: PerformanceQuery
) -> CMatrix:
    """Ψ over the columns of R̃, zero outside the observable blocks.

    [Ψ_kl]_{qb} = Σ_{p≤q} Σ_{a≤b} ν_{d_k+p, d_l+a}·⟨h̃_pq^(k), h̃_ab^(l)⟩
    """
    return _assemble_psi(S, W, query)[0]


def h2_normal(S: SpectralData, W: GeometricWeights, query: PerformanceQuery) -> float:
    """Squared H2 norm for a normal Laplacian from the diagonal of Ψ only.

    Raises:
        NotNormal: R is not unitary or has a nontrivial Jordan block
    """
    if not (S.is_diagonal and S.is_unitary()):
        raise NotNormal("h2_normal needs a unitary eigenvector basis")
    if query.input.kind != "identity":
        raise AssumptionViolated("h2_normal is defined for identity input covariance")
    return float(sum(_normal_terms(S, W, query).values()))


def _normal_terms(S: SpectralData, W: GeometricWeights, query: PerformanceQuery) -> dict[int, float]:
    terms = {}
    for k in W.observable:
        lam = S.eigenvalues[k - 1]
        nu_kk = float(W.nu[k - 2, k - 2].real)
        if query.dynamics == Dynamics.FIRST:
            if lam.real <= 0.0:
                raise DivergentIntegral(f"Re λ_{k} = {lam.real:.3e} is not positive")
            terms[k] = nu_kk / (2.0 * lam.real)
        else:
            terms[k] = nu_kk * psi_kk_second_order(lam, query.require_gains(), query.output)
    return terms


def _validate_query(S: SpectralData, query: PerformanceQuery) -> None:
    if query.C.shape[1] != S.n:
        raise ShapeMismatch(f"C has {query.C.shape[1]} columns, Laplacian has n={S.n}")
    check_assumptions(query.gains if query.dynamics == Dynamics.SECOND else None, query.C)


def performance(
    L: NDArray[np.float64],
    S: SpectralData,
    query: PerformanceQuery,
    W: Optional[GeometricWeights] = None,
) -> PerformanceResult:
    """P = Re tr(Σ_Q Ψ) for the query's network model, output and input.

    Args:
        L: Laplacian the decomposition belongs to
        S: its Jordan data, consensus block first
        query: dynamics, output, C, gains and input
        W: precomputed geometric weights for query.C, if any

    Returns:
        PerformanceResult with the path taken and per-column contributions
    """
    if L.shape != (S.n, S.n):
        raise ShapeMismatch(f"Laplacian shape {L.shape} does not match n={S.n}")
    _validate_query(S, query)
    W = W or geometric_weights(query.C, S)
    diagnostics: list[str] = []

    repeated: list[int] = []
    if query.dynamics == Dynamics.SECOND:
        gains = query.require_gains()
        bad = unstable_modes(S, gains, W.observable)
        if bad:
            raise Unstable(f"observable modes {bad} fail the Routh–Hurwitz test for {gains}")
        repeated = [k for k in W.observable if char_roots(S.eigenvalues[k - 1], gains).repeated]
        for k in repeated:
            diagnostics.append(f"block {k}: repeated characteristic root, repeated-root formula used")
        if repeated:
            logger.info("repeated characteristic roots at blocks %s", repeated)

    largest = max((S.block_sizes[k - 1] for k in W.observable), default=1)
    if largest > settings.MAX_JORDAN_BLOCK:
        raise BlockTooLarge(
            f"observable Jordan block of size {largest} exceeds {settings.MAX_JORDAN_BLOCK}"
        )

    psi_diag = np.zeros(S.n - 1)
    crossed: list[int] = []
    if query.input.kind == "identity" and S.is_diagonal and S.is_unitary():
        path = "normal"
        for k, term in _normal_terms(S, W, query).items():
            psi_diag[k - 2] = term
        trace = complex(psi_diag.sum())
    else:
        path = "diagonalizable" if S.is_diagonal else "jordan"
        psi, crossed = _assemble_psi(S, W, query)
        if crossed:
            diagnostics.append(
                f"blocks {crossed}: partial fractions cancel, cross Gramian used"
            )
            logger.info("partial-fraction cancellation at blocks %s, Sylvester route", crossed)
        psi_diag = np.diag(psi).real.copy()
        trace = complex(np.trace(sigma_q(S, query.input) @ psi))
    logger.debug("performance path=%s observable=%d", path, len(W.observable))

    value = trace.real
    imag_residual = abs(trace.imag)
    if imag_residual > settings.IMAG_RESIDUAL_TOL * (1.0 + abs(value)):
        diagnostics.append(f"imaginary residual {imag_residual:.3e} above tolerance")
        logger.warning("imaginary residual %.3e on a value of %.6e", imag_residual, value)

    clipped = False
    if value < 0.0:
        if value < -1e-9 * (1.0 + float(np.abs(psi_diag).sum())):
            raise DecompositionError(f"metric evaluated to {value:.6e}; decomposition is unreliable")
        diagnostics.append(f"value {value:.3e} clipped to 0")
        clipped = True
        value = 0.0

    return PerformanceResult(
        value=value,
        psi_diag=[float(x) for x in psi_diag],
        imag_residual=imag_residual,
        path=path,
        observable=list(W.observable),
        repeated_root_modes=repeated,
        cross_gramian_modes=crossed,
        clipped=clipped,
        diagnostics=diagnostics,
    )


def response_matrix(
    S: SpectralData, W: GeometricWeights, query: PerformanceQuery
) -> CMatrix:
    """G = Q̃*ΨQ̃, so that the deterministic metric is w₀ᵀGw₀."""
    _validate_query(S, query)
    psi = assemble_psi(S, W, query)
    G = S.q_tilde.conj().T @ psi @ S.q_tilde
    return (G + G.conj().T) / 2.0


def star_performance(
    n: int,
    dynamics: Dynamics,
    output: OutputKind,
    gains: Optional[GainSet],
    mu: tuple[float, ...] | list[float],
) -> float:
    """Imploding-star metric from the eigenvalues μ_1..μ_n of a circulant CᵀC.

    With μ ≡ 1 this is P_dav: (n−1)²/(2n) for a single integrator.
    """
    if n < 2:
        raise BadSize(f"imploding star needs n >= 2, got {n}")
    if len(mu) != n:
        raise ShapeMismatch(f"expected {n} eigenvalues of CᵀC, got {len(mu)}")
    mu_arr = np.asarray(mu, dtype=float)
    # pairs k < l in 2..n with l − k = d number n − 1 − d
    d = np.arange(1, n - 1)
    i = np.arange(2, n + 1)
    cosines = np.cos(2.0 * np.pi * np.outer(i - 1, d) / n) @ (n - 1 - d)
    first = (n - 1) / n**2 * float(np.sum(mu_arr[1:] * (n - 1 + cosines)))
    if dynamics == Dynamics.FIRST:
        return first
    if gains is None:
        raise AssumptionViolated("second-order star performance needs gains")
    c = n / (n - 1)
    alpha = gains.k_p + gains.gamma_p * c
    phi = gains.k_d + gains.gamma_d * c
    if alpha <= 0.0 or phi <= 0.0:
        raise Unstable(f"star modes are not stable for {gains}")
    p0 = 2.0 * n / (n - 1) * first
    if output == OutputKind.POSITION:
        return p0 / (2.0 * alpha * phi)
    return p0 / (2.0 * phi)
