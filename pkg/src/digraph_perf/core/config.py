"""应用程序配置模块.

使用 pydantic-settings 从环境变量和 .env 文件加载配置，所有变量带 DIGRAPH_PERF_ 前缀。

配置分类:
    - 基础配置: 项目名称、版本、日志级别
    - 并行配置: 扫描（sweep）的最大线程数
    - 数值容差: 假设检查、特征分解、重根判定、观测性判定
    - 预言机（oracle）配置: RK4 步长、时域积分上限

使用示例:
    from digraph_perf.core.config import settings

    # 访问配置
    threads = settings.THREADS
    tol = settings.REPEATED_ROOT_TOL

    # 命令行覆盖容差
    local = settings.override({"RESIDUAL_TOL": 1e-7})
"""
from collections.abc import Mapping
from typing import Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Settings(BaseSettings):
    """运行时配置类，从环境变量加载.

    环境变量优先于 .env 文件，不区分大小写，未知配置项会被忽略。
    例如 DIGRAPH_PERF_THREADS=8 限制扫描并行度为 8 个线程。
    """

    model_config = SettingsConfigDict(
        env_prefix="DIGRAPH_PERF_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Project metadata
    PROJECT_NAME: str = "digraph-perf"
    VERSION: str = "0.1.0"
    LOG_LEVEL: str = Field(default="WARNING", description="Package logger level")

    # Sweep parallelism
    THREADS: int = Field(default=4, ge=1, le=256, description="Worker threads for sweeps")

    # Structural tolerances
    ASSUMPTION_TOL: float = Field(
        default=1e-12, gt=0.0, description="Absolute tolerance for C·1 = 0 and L·1 = 0"
    )
    BALANCE_TOL: float = Field(
        default=1e-10, gt=0.0, description="Column-sum tolerance for weight balance"
    )
    NORMAL_TOL: float = Field(
        default=1e-10, gt=0.0, description="Relative commutator tolerance for normality"
    )

    # Decomposition
    ZERO_EIG_TOL: float = Field(
        default=1e-9, gt=0.0, description="|λ| ≤ tol·‖L‖_F identifies the consensus eigenvalue"
    )
    COND_MAX: float = Field(
        default=1e8, gt=1.0, description="Largest accepted eigenvector condition number"
    )
    RESIDUAL_TOL: float = Field(
        default=1e-8, gt=0.0, description="Relative residual for LR = RJ and R·R⁻¹ = I"
    )
    OBSV_TOL: float = Field(default=1e-10, gt=0.0, description="Observable index threshold")
    MAX_JORDAN_BLOCK: int = Field(default=20, ge=1, le=40, description="Largest Jordan block")

    # Closed form
    REPEATED_ROOT_TOL: float = Field(
        default=1e-9, gt=0.0, description="Discriminant threshold shared by stability and closed form"
    )
    IMAG_RESIDUAL_TOL: float = Field(
        default=1e-9, gt=0.0, description="Allowed imaginary part of tr(Σ_Q Ψ) relative to 1 + value"
    )
    CANCELLATION_MAX: float = Field(
        default=1e4,
        gt=1.0,
        description="Σ|terms| / |sum| above which a kernel entry is recomputed by Sylvester",
    )
    COMPARE_TOL: float = Field(
        default=1e-9, gt=0.0, description="Relative band for Less/Equal/Greater"
    )

    # Oracle
    ORACLE_RTOL: float = Field(
        default=1e-8, gt=0.0, description="Closed form vs Gramian acceptance in oracle-check"
    )
    RK4_DT: float = Field(default=1e-2, gt=0.0, description="RK4 step")
    RK4_HORIZON: float = Field(default=10.0, gt=0.0, description="Initial RK4 horizon chunk")
    RK4_TAIL_TOL: float = Field(default=1e-6, gt=0.0, description="Stop once a chunk adds less")
    RK4_MAX_STEPS: int = Field(default=10_000_000, ge=1, description="Hard cap on RK4 steps")

    # Output
    CSV_DIGITS: int = Field(default=17, ge=1, le=17, description="Significant digits in CSV")

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize the level name and reject unknown levels."""
        level = v.strip().upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}, got {v!r}")
        return level

    def override(self, updates: Mapping[str, Any]) -> "Settings":
        """Return a validated copy with some fields replaced.

        Keys are matched case-insensitively against field names.

        Raises:
            pydantic.ValidationError: unknown key or value out of range
        """
        fields = type(self).model_fields
        data = self.model_dump()
        has_unknown = False
        for key, value in updates.items():
            name = key.strip().upper()
            if name not in fields:
                has_unknown = True
                name = key
            data[name] = value
        if has_unknown:
            # extra="ignore" would drop them silently; this raises on them
            _StrictSettings.model_validate(data)
        return type(self).model_validate(data)


class _StrictSettings(Settings):
    model_config = SettingsConfigDict(extra="forbid")


settings = Settings()


def apply_overrides(updates: Mapping[str, Any]) -> Settings:
    """Validate ``updates`` and write them into the global settings in place.

    Modules read ``settings`` at call time, so this affects every later computation.
    """
    validated = settings.override(updates)
    for name in type(settings).model_fields:
        setattr(settings, name, getattr(validated, name))
    return settings
