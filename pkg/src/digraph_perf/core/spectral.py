"""Laplacian 的 Jordan/特征分解与几何权重.

分解 L = R J R⁻¹，并按 R = [α·1, R̃]、R⁻¹ = [q₁; Q̃] 划分：
    - 已知图族（环、星形、路径）使用解析分解，可处理不可对角化的路径图
    - 正规 Laplacian 使用复 Schur 分解，得到酉矩阵 R（α = 1/√n）
    - 其余情况使用数值特征分解，仅在特征向量矩阵条件数足够小时接受（α = 1）

几何权重 ν_ηκ = r_η* M r_κ（M = CᵀC）与 Σ_Q = Q̃ Σ₀ Q̃* 决定性能指标 P = tr(Σ_Q Ψ)。

使用示例:
    from digraph_perf.core.graph import cyclic_laplacian, deviation_from_average_output
    from digraph_perf.core.spectral import decompose, geometric_weights
    from digraph_perf.schemas import FamilyHint

    L = cyclic_laplacian(4, 1.0, 1)
    S = decompose(L, FamilyHint(kind="cycle", n=4))
    W = geometric_weights(deviation_from_average_output(4), S)
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray
from pydantic import ValidationError

from digraph_perf.core.config import settings
from digraph_perf.core.errors import (
    DefectiveOrIllConditioned,
    InputParseError,
    InvalidJordanData,
    NoReachableNode,
    NotPSD,
    OutputAssumptionViolated,
    ResidualTooLarge,
    ShapeMismatch,
    SingularR,
)
from digraph_perf.core.graph import (
    digraph_from_laplacian,
    has_globally_reachable_node,
    is_normal,
    validate_laplacian,
)
from digraph_perf.schemas.graph import FamilyHint, JordanImport
from digraph_perf.schemas.query import InputSpec

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]
Matrix = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Jordan data of L with the consensus block first.

    Block indices follow the 1-based convention k = 1..m, block 1 being the
    simple zero eigenvalue. Columns of R belonging to block k are
    ``R[:, block_columns(k)]``.
    """

    eigenvalues: tuple[complex, ...]
    block_sizes: tuple[int, ...]
    R: CMatrix
    Rinv: CMatrix
    alpha: complex
    source: str = "numeric"

    @property
    def n(self) -> int:
        return int(self.R.shape[0])

    @property
    def m(self) -> int:
        return len(self.block_sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """d_k = Σ_{i<k} n_i, as 0-based column offsets."""
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.block_sizes)[:-1]]))

    def block_columns(self, k: int) -> slice:
        start = self.offsets[k - 1]
        return slice(start, start + self.block_sizes[k - 1])

    @property
    def r_tilde(self) -> CMatrix:
        return self.R[:, 1:]

    @property
    def q_tilde(self) -> CMatrix:
        return self.Rinv[1:, :]

    @cached_property
    def column_blocks(self) -> NDArray[np.int64]:
        """1-based block index of every column of R."""
        return np.repeat(np.arange(1, self.m + 1), self.block_sizes)

    @property
    def is_diagonal(self) -> bool:
        return all(size == 1 for size in self.block_sizes)

    def jordan(self) -> CMatrix:
        return jordan_matrix(self.eigenvalues, self.block_sizes)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        gram = self.R.conj().T @ self.R
        return bool(np.linalg.norm(gram - np.eye(self.n), "fro") <= tol * self.n)


@dataclass(frozen=True, eq=False)
class GeometricWeights:
    """ν over the columns of R̃, eigenvalues μ of M = CᵀC and observable blocks."""

    nu: CMatrix
    mu: tuple[float, ...]
    observable: tuple[int, ...]


def jordan_matrix(eigenvalues: tuple[complex, ...], block_sizes: tuple[int, ...]) -> CMatrix:
    """Block-diagonal J with ones on the superdiagonal inside each block."""
    n = int(sum(block_sizes))
    J = np.zeros((n, n), dtype=complex)
    start = 0
    for lam, size in zip(eigenvalues, block_sizes, strict=True):
        idx = np.arange(start, start + size)
        J[idx, idx] = lam
        J[idx[:-1], idx[1:]] = 1.0
        start += size
    return J


def _fix_gauge(v: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Unit 2-norm with the first entry of largest magnitude made real positive."""
    v = v / np.linalg.norm(v)
    pivot = v[int(np.argmax(np.abs(v)))]
    return v * (np.conj(pivot) / abs(pivot))


def _consensus_first(eigs: NDArray[np.complex128], scale: float) -> NDArray[np.int64]:
    """Permutation putting the unique zero eigenvalue first, the rest sorted."""
    zero = int(np.argmin(np.abs(eigs)))
    tol = settings.ZERO_EIG_TOL * scale
    if abs(eigs[zero]) > tol:
        raise NoReachableNode(f"no zero eigenvalue found (smallest |λ| = {abs(eigs[zero]):.3e})")
    rest = np.array([i for i in range(len(eigs)) if i != zero], dtype=np.int64)
    if rest.size and np.abs(eigs[rest]).min() <= tol:
        raise NoReachableNode("zero eigenvalue is not simple")
    rest = rest[np.lexsort((eigs[rest].imag.round(12), eigs[rest].real.round(12)))]
    return np.concatenate([[zero], rest]).astype(np.int64)


def _cycle_decomposition(hint: FamilyHint) -> SpectralData:
    n, d, omega = hint.n, hint.d, hint.omega
    theta = 2.0 * np.pi * np.arange(n) / n
    hops = np.arange(1, omega + 1)
    lam = d * (1.0 - np.exp(-1j * np.outer(theta, hops)).sum(axis=1) / omega)
    lam[0] = 0.0
    R = np.exp(-1j * np.outer(np.arange(n), theta)) / np.sqrt(n)
    return SpectralData(
        eigenvalues=tuple(complex(x) for x in lam),
        block_sizes=(1,) * n,
        R=R,
        Rinv=R.conj().T,
        alpha=1.0 / np.sqrt(n),
        source="cycle",
    )


def _star_decomposition(hint: FamilyHint) -> SpectralData:
    n = hint.n
    c = n / (n - 1)
    R = np.zeros((n, n), dtype=complex)
    R[:, 0] = 1.0
    R[: n - 1, 1:] = np.eye(n - 1)
    Rinv = np.zeros((n, n), dtype=complex)
    Rinv[0, n - 1] = 1.0
    Rinv[1:, : n - 1] = np.eye(n - 1)
    Rinv[1:, n - 1] = -1.0
    return SpectralData(
        eigenvalues=(0j,) + (complex(c),) * (n - 1),
        block_sizes=(1,) * n,
        R=R,
        Rinv=Rinv,
        alpha=1.0,
        source="star",
    )


def _path_decomposition(hint: FamilyHint) -> SpectralData:
    # chain v_p = (−1)^{p−1} e_{n−p+1}: (L − I)v_1 = 0, (L − I)v_{p+1} = v_p
    n = hint.n
    R = np.zeros((n, n), dtype=complex)
    R[:, 0] = 1.0
    for p in range(1, n):
        R[n - p, p] = (-1.0) ** (p - 1)
    return SpectralData(
        eigenvalues=(0j, 1.0 + 0j),
        block_sizes=(1, n - 1),
        R=R,
        Rinv=la.inv(R),
        alpha=1.0,
        source="path",
    )


_FAMILY_DECOMPOSITIONS = {
    "cycle": _cycle_decomposition,
    "complete": lambda hint: _cycle_decomposition(
        FamilyHint(kind="cycle", n=hint.n, d=1.0, omega=hint.n - 1)
    ),
    "star": _star_decomposition,
    "path": _path_decomposition,
}


def _normal_decomposition(L: Matrix) -> SpectralData:
    n = L.shape[0]
    T, Z = la.schur(L.astype(complex), output="complex")
    eigs = np.diag(T)
    order = _consensus_first(eigs, float(np.linalg.norm(L, "fro")))
    R = Z[:, order].copy()
    R[:, 0] = 1.0 / np.sqrt(n)
    for k in range(1, n):
        R[:, k] = _fix_gauge(R[:, k])
    return SpectralData(
        eigenvalues=tuple(complex(x) for x in eigs[order]),
        block_sizes=(1,) * n,
        R=R,
        Rinv=R.conj().T,
        alpha=1.0 / np.sqrt(n),
        source="normal",
    )


def _numeric_decomposition(L: Matrix) -> SpectralData:
    n = L.shape[0]
    eigs, V = la.eig(L)
    order = _consensus_first(eigs, float(np.linalg.norm(L, "fro")))
    R = V[:, order].astype(complex)
    for k in range(1, n):
        R[:, k] = _fix_gauge(R[:, k])
    R[:, 0] = 1.0
    cond = float(np.linalg.cond(R))
    if not np.isfinite(cond) or cond > settings.COND_MAX:
        raise DefectiveOrIllConditioned(
            f"eigenvector matrix condition number {cond:.3e} exceeds {settings.COND_MAX:.1e}; "
            "supply a family hint or explicit Jordan data"
        )
    return SpectralData(
        eigenvalues=tuple(complex(x) for x in eigs[order]),
        block_sizes=(1,) * n,
        R=R,
        Rinv=la.inv(R),
        alpha=1.0,
        source="numeric",
    )


def validate_spectral(L: Matrix, S: SpectralData) -> SpectralData:
    """Check the residual, inverse and partition invariants of S against L."""
    n = L.shape[0]
    if S.R.shape != (n, n) or S.Rinv.shape != (n, n) or sum(S.block_sizes) != n:
        raise ShapeMismatch(f"Jordan data does not match a {n}×{n} Laplacian")
    norm_L = float(np.linalg.norm(L, "fro"))
    scale = max(1.0, float(np.linalg.norm(S.R, "fro")) / np.sqrt(n))
    residual = float(np.linalg.norm(L @ S.R - S.R @ S.jordan(), "fro"))
    if residual > settings.RESIDUAL_TOL * max(norm_L, 1e-300) * scale:
        raise ResidualTooLarge(
            f"‖LR − RJ‖_F = {residual:.3e} exceeds {settings.RESIDUAL_TOL:.1e}·‖L‖_F"
        )
    inverse_error = float(np.linalg.norm(S.R @ S.Rinv - np.eye(n), "fro"))
    if inverse_error > settings.RESIDUAL_TOL:
        raise SingularR(f"‖R·R⁻¹ − I‖_F = {inverse_error:.3e}")
    lam = np.asarray(S.eigenvalues)
    if S.block_sizes[0] != 1 or abs(lam[0]) > settings.ZERO_EIG_TOL * max(norm_L, 1e-300):
        raise InvalidJordanData("block 1 must be the simple zero eigenvalue")
    if (lam[1:].real <= 0.0).any():
        raise InvalidJordanData("every eigenvalue beyond the first needs Re λ > 0")
    first = S.R[:, 0]
    if np.linalg.norm(first - S.alpha) > settings.RESIDUAL_TOL * np.linalg.norm(first):
        raise InvalidJordanData("first column of R must be α·1")
    return S


def decompose(L: Matrix, hint: Optional[FamilyHint] = None) -> SpectralData:
    """L = RJR⁻¹ with R = [α·1, R̃].

    Raises:
        NoReachableNode: L has no globally reachable node
        DefectiveOrIllConditioned: numeric path cannot certify diagonalizability
    """
    validate_laplacian(L)
    if not has_globally_reachable_node(digraph_from_laplacian(L)):
        raise NoReachableNode("the graph has no globally reachable node")

    if hint is not None:
        if hint.n != L.shape[0]:
            raise ShapeMismatch(f"hint is for n={hint.n}, Laplacian has n={L.shape[0]}")
        S = _FAMILY_DECOMPOSITIONS[hint.kind](hint)
    elif is_normal(L):
        S = _normal_decomposition(L)
    else:
        S = _numeric_decomposition(L)
    logger.debug("decomposed n=%d via %s into %d blocks", L.shape[0], S.source, S.m)
    return validate_spectral(L, S)


def import_jordan(
    L: Matrix,
    eigenvalues: tuple[complex, ...] | list[complex],
    block_sizes: tuple[int, ...] | list[int],
    R: CMatrix,
) -> SpectralData:
    """Validate user-supplied Jordan data and wrap it as SpectralData."""
    R = np.asarray(R, dtype=complex)
    n = L.shape[0]
    if len(eigenvalues) != len(block_sizes):
        raise ShapeMismatch("one eigenvalue per Jordan block is required")
    if R.shape != (n, n) or sum(block_sizes) != n or min(block_sizes, default=0) < 1:
        raise ShapeMismatch(f"R must be {n}×{n} and block sizes must sum to {n}")
    cond = float(np.linalg.cond(R))
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularR(f"R is singular (condition number {cond:.3e})")
    try:
        Rinv = la.inv(R)
    except la.LinAlgError as e:
        raise SingularR(f"R is singular: {e}") from e
    S = SpectralData(
        eigenvalues=tuple(complex(x) for x in eigenvalues),
        block_sizes=tuple(int(b) for b in block_sizes),
        R=R,
        Rinv=Rinv,
        alpha=complex(R[0, 0]),
        source="import",
    )
    return validate_spectral(L, S)


def load_jordan(path: str | Path) -> JordanImport:
    try:
        return JordanImport.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise InputParseError(f"cannot read Jordan data from {path}: {e}") from e


def import_jordan_model(L: Matrix, data: JordanImport) -> SpectralData:
    """import_jordan fed from the Jordan import JSON model."""
    eigenvalues = [complex(re, im) for re, im in data.eigenvalues]
    R = np.array([[complex(re, im) for re, im in row] for row in data.R], dtype=complex)
    return import_jordan(L, eigenvalues, data.block_sizes, R)


def check_output_matrix(C: Matrix) -> None:
    """Raise OutputAssumptionViolated unless C·1 = 0."""
    residual = float(np.abs(C.sum(axis=1)).max(initial=0.0))
    if residual > settings.ASSUMPTION_TOL * max(1.0, float(np.abs(C).max(initial=0.0))):
        raise OutputAssumptionViolated(f"C·1 must vanish, got max |row sum| = {residual:.3e}")


def observable_indices(C: Matrix, S: SpectralData) -> tuple[int, ...]:
    """1-based blocks k ≥ 2 whose columns are not annihilated by C."""
    check_output_matrix(C)
    if C.shape[1] != S.n:
        raise ShapeMismatch(f"C has {C.shape[1]} columns, expected {S.n}")
    norm_C = float(np.linalg.norm(C, "fro"))
    observable = []
    for k in range(2, S.m + 1):
        Rk = S.R[:, S.block_columns(k)]
        if np.linalg.norm(C @ Rk, "fro") > settings.OBSV_TOL * norm_C * np.linalg.norm(Rk, "fro"):
            observable.append(k)
    return tuple(observable)


def geometric_weights(C: Matrix, S: SpectralData) -> GeometricWeights:
    """ν_ηκ = Σ_{l≥2} ⟨θ_l, r_η⟩⟨r_κ, θ_l⟩ μ_l over the columns of R̃."""
    observable = observable_indices(C, S)
    n = S.n
    # orthonormal basis of 1^⊥, so θ_1 = 1/√n pairs with μ_1 = 0
    U = la.null_space(np.ones((1, n)))
    M = C.T @ C
    mu_rest, V = la.eigh(U.T @ M @ U)
    mu_rest = np.clip(mu_rest, 0.0, None)
    theta = U @ V
    proj = theta.T @ S.r_tilde
    nu = proj.conj().T @ (mu_rest[:, None] * proj)
    nu = (nu + nu.conj().T) / 2.0
    return GeometricWeights(
        nu=nu,
        mu=(0.0,) + tuple(float(x) for x in mu_rest),
        observable=observable,
    )


def sigma_q(S: SpectralData, spec: InputSpec) -> CMatrix:
    """Σ_Q = Q̃ Σ₀ Q̃* for the input's covariance."""
    sigma0 = spec.sigma(S.n)
    if sigma0.shape != (S.n, S.n):
        raise ShapeMismatch(f"input covariance must be {S.n}×{S.n}, got {sigma0.shape}")
    scale = max(1.0, float(np.abs(sigma0).max(initial=0.0)))
    if np.abs(sigma0 - sigma0.T).max(initial=0.0) > 1e-10 * scale:
        raise NotPSD("input covariance must be symmetric")
    if la.eigvalsh(sigma0).min() < -1e-10 * scale:
        raise NotPSD("input covariance must be positive semidefinite")
    Q = S.q_tilde
    out = Q @ sigma0 @ Q.conj().T
    return (out + out.conj().T) / 2.0


def fourier_mu(C: Matrix) -> tuple[float, ...]:
    """μ_i = θ_i* CᵀC θ_i for θ_i = (1/√n)[1, e^{j2π(i−1)/n}, ...]*."""
    n = C.shape[1]
    theta = np.exp(-1j * np.outer(np.arange(n), 2.0 * np.pi * np.arange(n) / n)) / np.sqrt(n)
    CT = C @ theta
    return tuple(float(x) for x in np.einsum("ij,ij->j", CT.conj(), CT).real)
