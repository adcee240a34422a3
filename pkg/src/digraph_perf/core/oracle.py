"""状态空间参照实现（oracle）.

与闭式公式独立地计算同一性能指标:
    - assemble: 组装一阶 / 二阶闭环状态空间 (A, B, Cout)
    - deflate: 在 Jordan 坐标下删除共识模态，得到 (Ã, B̃, C̃)
    - h2_norm / l2_response / covariance_response: 复 Lyapunov 方程（Schur 方法）
    - mode_sylvester: 两个 2×2 模态实现之间的 Sylvester 方程
    - simulate_impulse: 显式 RK4 时域积分，作为第二参照

使用示例:
    from digraph_perf.core.oracle import assemble, deflate, h2_norm

    ss = assemble(L, None, Dynamics.FIRST, OutputKind.POSITION, C)
    print(h2_norm(deflate(ss, S)))
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
from numpy.typing import NDArray

from digraph_perf.core.config import settings
from digraph_perf.core.errors import (
    HorizonExceeded,
    LyapunovIllConditioned,
    ShapeMismatch,
    Unstable,
)
from digraph_perf.core.spectral import SpectralData, check_output_matrix
from digraph_perf.schemas.query import Dynamics, GainSet, OutputKind

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class StateSpace:
    A: CMatrix
    B: CMatrix
    C: CMatrix
    order: int

    @property
    def n(self) -> int:
        return int(self.B.shape[1])


@dataclass(frozen=True, eq=False)
class DeflatedSystem:
    """Closed loop in Jordan coordinates without the consensus block.

    ``B = input_map @ q_tilde[columns]`` where ``columns`` are the kept columns of R̃.
    """

    A: CMatrix
    B: CMatrix
    C: CMatrix
    input_map: CMatrix
    q_tilde: CMatrix
    columns: NDArray[np.int64]


def assemble(
    L: NDArray[np.float64],
    gains: Optional[GainSet],
    dynamics: Dynamics,
    output: OutputKind,
    C: NDArray[np.float64],
) -> StateSpace:
    """Closed-loop (A, B, Cout) of the single- or double-integrator network."""
    n = L.shape[0]
    if L.shape != (n, n) or C.ndim != 2 or C.shape[1] != n:
        raise ShapeMismatch(f"L is {L.shape} and C is {C.shape}")
    if dynamics == Dynamics.FIRST:
        if output != OutputKind.POSITION:
            raise ValueError("velocity output requires second-order dynamics")
        return StateSpace(
            A=-L.astype(complex), B=np.eye(n, dtype=complex), C=C.astype(complex), order=1
        )

    if gains is None:
        raise ValueError("second-order dynamics require gains")
    eye = np.eye(n)
    A = np.block(
        [
            [np.zeros((n, n)), eye],
            [-gains.k_p * eye - gains.gamma_p * L, -gains.k_d * eye - gains.gamma_d * L],
        ]
    )
    B = np.vstack([np.zeros((n, n)), eye])
    zeros = np.zeros_like(C)
    Cout = np.hstack([C, zeros]) if output == OutputKind.POSITION else np.hstack([zeros, C])
    return StateSpace(A=A.astype(complex), B=B.astype(complex), C=Cout.astype(complex), order=2)


def deflate(
    ss: StateSpace, S: SpectralData, blocks: Optional[tuple[int, ...]] = None
) -> DeflatedSystem:
    """Change basis by kron(I, R) and delete the consensus block.

    Args:
        ss: assembled closed loop
        S: Jordan data of the Laplacian
        blocks: 1-based blocks to keep (default every block k ≥ 2); dropped blocks
            must be unobservable for the transfer function to be preserved
    """
    n = S.n
    if ss.n != n:
        raise ShapeMismatch(f"state space has n={ss.n}, Jordan data has n={S.n}")
    check_output_matrix(_output_rows(ss))
    T = np.kron(np.eye(ss.order), S.R)
    Tinv = np.kron(np.eye(ss.order), S.Rinv)
    A_hat = Tinv @ ss.A @ T
    B_hat = Tinv @ ss.B
    C_hat = ss.C @ T

    blocks = blocks if blocks is not None else tuple(range(2, S.m + 1))
    columns = np.concatenate(
        [np.arange(S.block_columns(k).start, S.block_columns(k).stop) for k in blocks]
        or [np.zeros(0, dtype=np.int64)]
    ).astype(np.int64)
    keep = np.concatenate([columns + i * n for i in range(ss.order)])
    input_map = np.zeros((len(keep), len(columns)), dtype=complex)
    input_map[(ss.order - 1) * len(columns) :, :] = np.eye(len(columns))
    return DeflatedSystem(
        A=A_hat[np.ix_(keep, keep)],
        B=B_hat[keep, :],
        C=C_hat[:, keep],
        input_map=input_map,
        q_tilde=S.q_tilde,
        columns=columns - 1,
    )


def _output_rows(ss: StateSpace) -> NDArray[np.float64]:
    """C recovered from Cout (one of the two halves is zero for second order)."""
    n = ss.n
    if ss.order == 1:
        return ss.C.real
    return (ss.C[:, :n] + ss.C[:, n:]).real


def _require_stable(A: CMatrix) -> None:
    if A.size == 0:
        return
    worst = float(np.linalg.eigvals(A).real.max())
    if worst >= 0.0:
        raise Unstable(f"deflated system has an eigenvalue with real part {worst:.3e}")


def observability_gramian(d: DeflatedSystem) -> CMatrix:
    """X with Ã*X + XÃ = −C̃*C̃, checked Hermitian PSD."""
    _require_stable(d.A)
    if d.A.size == 0:
        return np.zeros((0, 0), dtype=complex)
    Q = d.C.conj().T @ d.C
    X = la.solve_continuous_lyapunov(d.A.conj().T, -Q)
    scale = max(float(np.linalg.norm(X, "fro")), 1e-300)
    residual = float(np.linalg.norm(d.A.conj().T @ X + X @ d.A + Q, "fro"))
    if residual > 1e-6 * max(float(np.linalg.norm(Q, "fro")), 1e-300):
        raise LyapunovIllConditioned(f"Lyapunov residual {residual:.3e}")
    if np.linalg.norm(X - X.conj().T, "fro") > 1e-8 * scale:
        raise LyapunovIllConditioned("Gramian is not Hermitian")
    X = (X + X.conj().T) / 2.0
    if la.eigvalsh(X).min() < -1e-8 * scale:
        raise LyapunovIllConditioned("Gramian is not positive semidefinite")
    return X


def h2_norm(d: DeflatedSystem) -> float:
    """tr(B̃*XB̃), the squared H2 norm."""
    X = observability_gramian(d)
    return float(np.trace(d.B.conj().T @ X @ d.B).real)


def l2_response(d: DeflatedSystem, w0: NDArray[np.float64]) -> float:
    """(B̃w₀)* X (B̃w₀) for one impulse direction."""
    X = observability_gramian(d)
    v = d.B @ np.asarray(w0, dtype=float).reshape(-1)
    return float(np.vdot(v, X @ v).real)


def covariance_response(d: DeflatedSystem, sigma0: NDArray[np.float64]) -> float:
    X = observability_gramian(d)
    return float(np.trace(sigma0 @ d.B.conj().T @ X @ d.B).real)


def gramian_psi(d: DeflatedSystem) -> CMatrix:
    """Ψ over the columns of R̃ from the deflated Gramian (zero outside kept columns)."""
    X = observability_gramian(d)
    n1 = d.q_tilde.shape[0]
    psi = np.zeros((n1, n1), dtype=complex)
    psi[np.ix_(d.columns, d.columns)] = d.input_map.conj().T @ X @ d.input_map
    return psi


def mode_realization(lam: complex, gains: GainSet) -> CMatrix:
    return np.array(
        [[0.0, 1.0], [-(gains.k_p + gains.gamma_p * lam), -(gains.k_d + gains.gamma_d * lam)]],
        dtype=complex,
    )


def mode_sylvester(lam_k: complex, lam_l: complex, gains: GainSet, output: OutputKind) -> complex:
    """B*XB with Λ_k*X + XΛ_l = −CᵀC on the scalar mode realizations."""
    Ak = mode_realization(lam_k, gains)
    Al = mode_realization(lam_l, gains)
    _require_stable(Ak)
    _require_stable(Al)
    c = np.array([[1.0, 0.0]]) if output == OutputKind.POSITION else np.array([[0.0, 1.0]])
    X = la.solve_sylvester(Ak.conj().T, Al, -(c.T @ c).astype(complex))
    return complex(X[1, 1])


def transfer(system: StateSpace | DeflatedSystem, s: complex) -> CMatrix:
    """C(sI − A)⁻¹B at one complex frequency."""
    N = system.A.shape[0]
    return system.C @ np.linalg.solve(s * np.eye(N) - system.A, system.B)


def simulate_impulse(
    ss: StateSpace,
    w0: NDArray[np.float64],
    dt: Optional[float] = None,
    horizon: Optional[float] = None,
) -> float:
    """∫₀^∞ ‖Cout x(t)‖² dt by RK4 from x(0) = B·w₀.

    ``w0`` may be a matrix whose columns are separate impulse directions; the
    result then sums their responses (identity covariance for w0 = I).

    Raises:
        HorizonExceeded: the tail did not fall below the tolerance within RK4_MAX_STEPS
    """
    dt = settings.RK4_DT if dt is None else dt
    horizon = settings.RK4_HORIZON if horizon is None else horizon
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got {dt}")
    if horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    W = np.asarray(w0, dtype=float)
    X = ss.B @ (W.reshape(-1, 1) if W.ndim == 1 else W)

    # one RK4 step of ẋ = Ax is multiplication by this polynomial in hA
    hA = dt * ss.A
    step = np.eye(ss.A.shape[0], dtype=complex)
    term = step.copy()
    for order in range(1, 5):
        term = term @ hA / order
        step = step + term

    chunk = max(1, math.ceil(horizon / dt))
    y_prev = float(np.linalg.norm(ss.C @ X, "fro") ** 2)
    # Euler–Maclaurin end correction dt²/12·f'(0) lifts the trapezoid rule to fourth order
    slope = 2.0 * float(np.vdot(ss.C @ X, ss.C @ ss.A @ X).real)
    total = dt * dt / 12.0 * slope
    steps = 0
    while True:
        contribution = 0.0
        for _ in range(chunk):
            X = step @ X
            y = float(np.linalg.norm(ss.C @ X, "fro") ** 2)
            contribution += 0.5 * dt * (y_prev + y)
            y_prev = y
        steps += chunk
        if not np.isfinite(contribution):
            raise Unstable("impulse response diverged during integration")
        total += contribution
        if contribution <= settings.RK4_TAIL_TOL * total or total == 0.0:
            break
        if steps >= settings.RK4_MAX_STEPS:
            raise HorizonExceeded(f"no convergence after {steps} RK4 steps (integral {total:.6e})")
    logger.debug("RK4 finished after %d steps, t=%.3f", steps, steps * dt)
    return total
