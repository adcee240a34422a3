"""二阶模态传递函数 Ω_{k,δ}(s) 的部分分式展开.

Ω_{k,δ}(s) = r(s)·(γ_p + sγ_d)^{δ−1} / (s² + (k_d + γ_dλ)s + k_p + γ_pλ)^δ，
位置输出 r(s) = 1，速度输出 r(s) = s。

系数排列:
    - 相异根 ρ₁ ≠ ρ₂: c_l 对应 1/(s−ρ₁)^{δ−l+1}，c_{l+δ} 对应 1/(s−ρ₂)^{δ−l+1}（l = 1..δ）
    - 重根 ρ: c_l 对应 1/(s−ρ)^{2δ−l+1}（l = 1..2δ）

使用示例:
    from digraph_perf.core.partial_fractions import pf_coefficients_distinct
    from digraph_perf.schemas import GainSet, OutputKind

    c = pf_coefficients_distinct(3.0, GainSet(k_p=1, k_d=1, gamma_p=1, gamma_d=1), 2,
                                 OutputKind.POSITION)
"""
import math

import numpy as np
from numpy.typing import NDArray

from digraph_perf.core.config import settings
from digraph_perf.core.errors import BlockTooLarge, DistinctRoots, RepeatedRoots
from digraph_perf.core.stability import RootPair, char_roots
from digraph_perf.schemas.query import GainSet, OutputKind

CVector = NDArray[np.complex128]

# float factorials up to the double-precision limit
FACTORIALS = np.array([float(math.factorial(i)) for i in range(171)])


def binom(n: int, k: int) -> float:
    if k < 0 or n < 0 or k > n:
        return 0.0
    return float(FACTORIALS[n] / (FACTORIALS[k] * FACTORIALS[n - k]))


def _check_delta(delta: int) -> None:
    if delta < 1:
        raise ValueError(f"block order must be positive, got {delta}")
    if delta > settings.MAX_JORDAN_BLOCK:
        raise BlockTooLarge(
            f"Jordan block of size {delta} exceeds MAX_JORDAN_BLOCK={settings.MAX_JORDAN_BLOCK}"
        )


def _tau(zeta: int, l: int, delta: int) -> float:
    return (-1.0) ** (l - zeta - 1) * binom(l - 1, zeta) * binom(delta + l - zeta - 2, l - 1)


def _distinct_side(
    rho: complex, other: complex, gains: GainSet, delta: int, output: OutputKind
) -> CVector:
    gp, gd = gains.gamma_p, gains.gamma_d
    G = gp + rho * gd
    gap = rho - other
    out = np.zeros(delta, dtype=complex)
    for l in range(1, delta + 1):
        total = 0j
        for zeta in range(0, min(l - 1, delta - 1) + 1):
            if output == OutputKind.POSITION:
                numer = gd**zeta * G ** (delta - zeta - 1)
            elif zeta == 0:
                # cancelled form of γ_d^{−1}(δργ_d)/δ · G^{δ−1}
                numer = rho * G ** (delta - 1)
            else:
                numer = (
                    gd ** (zeta - 1)
                    * (zeta * gp + delta * rho * gd)
                    / (delta - zeta)
                    * G ** (delta - zeta - 1)
                )
            total += _tau(zeta, l, delta) * numer / gap ** (delta + l - zeta - 1)
        out[l - 1] = total
    return out


def pf_coefficients_distinct(
    lam: complex, gains: GainSet, delta: int, output: OutputKind, roots: RootPair | None = None
) -> CVector:
    """Coefficients c_1..c_{2δ} of Ω_{k,δ} when the characteristic roots differ.

    Raises:
        RepeatedRoots: the discriminant falls inside the repeated-root band
    """
    _check_delta(delta)
    roots = roots or char_roots(complex(lam), gains)
    if roots.repeated:
        raise RepeatedRoots(f"characteristic roots coincide at λ={lam}")
    first = _distinct_side(roots.rho1, roots.rho2, gains, delta, output)
    second = _distinct_side(roots.rho2, roots.rho1, gains, delta, output)
    return np.concatenate([first, second])


def pf_coefficients_repeated(
    lam: complex, gains: GainSet, delta: int, output: OutputKind, roots: RootPair | None = None
) -> CVector:
    """Coefficients c_1..c_{2δ} of Ω_{k,δ} for a double root ρ.

    Raises:
        DistinctRoots: the roots are separated
    """
    _check_delta(delta)
    roots = roots or char_roots(complex(lam), gains)
    if not roots.repeated:
        raise DistinctRoots(f"characteristic roots are distinct at λ={lam}")
    rho = roots.rho1
    gd = gains.gamma_d
    G = gains.gamma_p + rho * gd
    position = np.zeros(2 * delta + 1, dtype=complex)
    for l in range(1, delta + 1):
        position[l] = binom(delta - 1, l - 1) * gd ** (l - 1) * G ** (delta - l)
    if output == OutputKind.POSITION:
        return position[1:]
    # s = (s − ρ) + ρ shifts every power down by one
    velocity = np.zeros(2 * delta + 1, dtype=complex)
    velocity[1:] = rho * position[1:]
    velocity[2:] += position[1:-1]
    return velocity[1:]


def omega(lam: complex, gains: GainSet, delta: int, output: OutputKind, s: complex) -> complex:
    """Ω_{k,δ}(s) evaluated directly."""
    chi = s * s + (gains.k_d + gains.gamma_d * lam) * s + gains.k_p + gains.gamma_p * lam
    r = 1.0 if output == OutputKind.POSITION else s
    return complex(r * (gains.gamma_p + s * gains.gamma_d) ** (delta - 1) / chi**delta)


def reconstruct(coefficients: CVector, roots: RootPair, delta: int, s: complex) -> complex:
    """Partial-fraction sum for the coefficient layout of this module."""
    if roots.repeated:
        return complex(
            sum(
                c / (s - roots.rho1) ** (2 * delta - l + 1)
                for l, c in enumerate(coefficients, start=1)
            )
        )
    total = 0j
    for l in range(1, delta + 1):
        total += coefficients[l - 1] / (s - roots.rho1) ** (delta - l + 1)
        total += coefficients[l + delta - 1] / (s - roots.rho2) ** (delta - l + 1)
    return total
