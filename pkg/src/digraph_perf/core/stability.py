"""假设检查与输入输出稳定性判定."""
import cmath
import logging
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from digraph_perf.core.config import settings
from digraph_perf.core.errors import GainAssumptionViolated
from digraph_perf.core.spectral import SpectralData, check_output_matrix
from digraph_perf.schemas.query import GainSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeCoefficients:
    """α, φ, β, ξ of one eigenvalue under a gain set."""

    alpha: float
    phi: float
    beta: float
    xi: float

    @classmethod
    def of(cls, lam: complex, gains: GainSet) -> "ModeCoefficients":
        return cls(
            alpha=gains.k_p + gains.gamma_p * lam.real,
            phi=gains.k_d + gains.gamma_d * lam.real,
            beta=gains.gamma_p * lam.imag,
            xi=gains.gamma_d * lam.imag,
        )

    @property
    def hurwitz(self) -> float:
        """α φ² + β ξ φ − β²; positive together with φ for a stable mode."""
        return self.alpha * self.phi**2 + self.beta * self.xi * self.phi - self.beta**2

    @property
    def stable(self) -> bool:
        return self.hurwitz > 0.0 and self.phi > 0.0


@dataclass(frozen=True)
class RootPair:
    rho1: complex
    rho2: complex
    repeated: bool


def check_gains(gains: GainSet) -> None:
    if gains.k_p == 0.0 and gains.gamma_p == 0.0:
        raise GainAssumptionViolated("position feedback needs k_p > 0 or gamma_p > 0")
    if gains.k_d == 0.0 and gains.gamma_d == 0.0:
        raise GainAssumptionViolated("velocity feedback needs k_d > 0 or gamma_d > 0")


def check_assumptions(gains: GainSet | None, C: NDArray[np.float64]) -> None:
    """Feedback in both state variables (when gains are given) and C·1 = 0."""
    if gains is not None:
        check_gains(gains)
    check_output_matrix(C)


def char_roots(lam: complex, gains: GainSet) -> RootPair:
    """Roots of s² + (k_d + γ_d λ)s + (k_p + γ_p λ)."""
    b = gains.k_d + gains.gamma_d * lam
    c = gains.k_p + gains.gamma_p * lam
    disc = b * b - 4.0 * c
    root = cmath.sqrt(disc)
    repeated = abs(disc) <= settings.REPEATED_ROOT_TOL * (1.0 + abs(b) ** 2 + abs(c) ** 2)
    if repeated:
        rho = -b / 2.0
        return RootPair(rho, rho, True)
    return RootPair((-b + root) / 2.0, (-b - root) / 2.0, False)


def io_stable_first_order(C: NDArray[np.float64]) -> bool:
    residual = float(np.abs(C.sum(axis=1)).max(initial=0.0))
    return residual <= settings.ASSUMPTION_TOL * max(1.0, float(np.abs(C).max(initial=0.0)))


def unstable_modes(S: SpectralData, gains: GainSet, obsv: Iterable[int]) -> list[int]:
    """1-based observable blocks that fail the Routh–Hurwitz test (boundary counts as failure)."""
    return [k for k in obsv if not ModeCoefficients.of(S.eigenvalues[k - 1], gains).stable]


def io_stable_second_order(S: SpectralData, gains: GainSet, obsv: Iterable[int]) -> bool:
    bad = unstable_modes(S, gains, obsv)
    if bad:
        logger.debug("unstable observable modes: %s", bad)
    return not bad
