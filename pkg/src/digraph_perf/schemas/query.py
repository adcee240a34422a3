"""性能查询与结果模式。"""
from enum import Enum
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Dynamics(str, Enum):
    """Network model order."""
    FIRST = "first"  # ẋ = −Lx + w
    SECOND = "second"  # double integrator with absolute and relative feedback


class OutputKind(str, Enum):
    POSITION = "position"
    VELOCITY = "velocity"


class GainSet(BaseModel):
    """The four nonnegative feedback gains (k_p, k_d, γ_p, γ_d)."""

    model_config = ConfigDict(frozen=True)

    k_p: float = Field(default=0.0, ge=0.0, description="Absolute position feedback")
    k_d: float = Field(default=0.0, ge=0.0, description="Absolute velocity feedback")
    gamma_p: float = Field(default=0.0, ge=0.0, description="Relative position feedback")
    gamma_d: float = Field(default=0.0, ge=0.0, description="Relative velocity feedback")

    @classmethod
    def parse(cls, text: str) -> "GainSet":
        """Parse the ``kp,kd,gp,gd`` command-line format."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"gains need four comma-separated values, got {text!r}")
        k_p, k_d, gamma_p, gamma_d = (float(p) for p in parts)
        return cls(k_p=k_p, k_d=k_d, gamma_p=gamma_p, gamma_d=gamma_d)

    def with_gamma_p(self, gamma_p: float) -> "GainSet":
        return self.model_copy(update={"gamma_p": gamma_p})


def _as_real_matrix(value: Any, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class InputSpec(BaseModel):
    """Impulse input: a fixed direction, a covariance, or identity covariance."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["identity", "deterministic", "covariance"] = "identity"
    w0: Optional[np.ndarray] = Field(default=None, description="Direction vector (deterministic)")
    sigma0: Optional[np.ndarray] = Field(default=None, description="Covariance (covariance)")

    @field_validator("w0", mode="before")
    @classmethod
    def validate_w0(cls, v: Any) -> Optional[np.ndarray]:
        if v is None:
            return None
        arr = np.array(v, dtype=float).reshape(-1)
        arr.setflags(write=False)
        return arr

    @field_validator("sigma0", mode="before")
    @classmethod
    def validate_sigma0(cls, v: Any) -> Optional[np.ndarray]:
        if v is None:
            return None
        return _as_real_matrix(v, "sigma0")

    @model_validator(mode="after")
    def check_payload(self) -> "InputSpec":
        if self.kind == "deterministic" and self.w0 is None:
            raise ValueError("deterministic input needs w0")
        if self.kind == "covariance" and self.sigma0 is None:
            raise ValueError("covariance input needs sigma0")
        return self

    @classmethod
    def identity(cls) -> "InputSpec":
        return cls(kind="identity")

    @classmethod
    def deterministic(cls, w0: Any) -> "InputSpec":
        return cls(kind="deterministic", w0=w0)

    @classmethod
    def covariance(cls, sigma0: Any) -> "InputSpec":
        return cls(kind="covariance", sigma0=sigma0)

    def sigma(self, n: int) -> np.ndarray:
        """Σ_0 as an n×n matrix (w_0 w_0ᵀ for a deterministic direction)."""
        if self.kind == "identity":
            return np.eye(n)
        if self.kind == "deterministic":
            assert self.w0 is not None
            return np.outer(self.w0, self.w0)
        assert self.sigma0 is not None
        return np.array(self.sigma0)


class PerformanceQuery(BaseModel):
    """Dynamics order, output kind, output matrix C, gains and input."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dynamics: Dynamics = Dynamics.FIRST
    output: OutputKind = OutputKind.POSITION
    C: np.ndarray = Field(..., description="q×n output matrix")
    gains: Optional[GainSet] = Field(default=None, description="Required for second order")
    input: InputSpec = Field(default_factory=InputSpec.identity)

    @field_validator("C", mode="before")
    @classmethod
    def validate_c(cls, v: Any) -> np.ndarray:
        return _as_real_matrix(v, "C")

    @model_validator(mode="after")
    def check_combination(self) -> "PerformanceQuery":
        if self.dynamics == Dynamics.FIRST and self.output == OutputKind.VELOCITY:
            raise ValueError("velocity output requires second-order dynamics")
        if self.dynamics == Dynamics.SECOND and self.gains is None:
            raise ValueError("second-order dynamics require gains")
        return self

    @property
    def n(self) -> int:
        return int(self.C.shape[1])

    def require_gains(self) -> GainSet:
        if self.gains is None:
            raise ValueError("second-order dynamics require gains")
        return self.gains

    def with_input(self, spec: InputSpec) -> "PerformanceQuery":
        return self.model_copy(update={"input": spec})


class PerformanceResult(BaseModel):
    """Scalar metric plus per-mode contributions and diagnostics."""

    value: float = Field(..., ge=0.0)
    psi_diag: list[float] = Field(
        default_factory=list, description="Re ν-weighted Ψ_kk per column of R̃"
    )
    imag_residual: float = Field(default=0.0, description="Discarded imaginary part of the trace")
    path: Literal["normal", "diagonalizable", "jordan"] = "jordan"
    observable: list[int] = Field(default_factory=list, description="1-based block indices")
    repeated_root_modes: list[int] = Field(default_factory=list)
    cross_gramian_modes: list[int] = Field(
        default_factory=list, description="Blocks whose kernel came from the Sylvester route"
    )
    clipped: bool = False
    diagnostics: list[str] = Field(default_factory=list)
