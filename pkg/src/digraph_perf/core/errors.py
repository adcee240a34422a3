"""错误类型定义.

所有领域错误继承自 DigraphPerfError，并携带命令行退出码：
    - 1: 输入/解析错误
    - 2: 系统不稳定（性能积分发散）
    - 3: 违反假设（增益、输出矩阵、正规性）
    - 4: 分解失败（不可对角化、无全局可达节点、Jordan 数据无效）
"""
from typing import Any


class DigraphPerfError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


# Input and structure (exit 1)


class InvalidGraph(DigraphPerfError, ValueError):
    pass


class BadOmega(DigraphPerfError, ValueError):
    pass


class BadSize(DigraphPerfError, ValueError):
    pass


class NotWeightBalanced(DigraphPerfError, ValueError):
    pass


class ShapeMismatch(DigraphPerfError, ValueError):
    pass


class NotPSD(DigraphPerfError, ValueError):
    pass


class RepeatedRoots(DigraphPerfError, ValueError):
    pass


class DistinctRoots(DigraphPerfError, ValueError):
    pass


class InputParseError(DigraphPerfError, ValueError):
    pass


class LyapunovIllConditioned(DigraphPerfError, RuntimeError):
    pass


class HorizonExceeded(DigraphPerfError, RuntimeError):
    pass


# Stability (exit 2)


class Unstable(DigraphPerfError, RuntimeError):
    exit_code = 2


class DivergentIntegral(Unstable):
    pass


# Assumptions (exit 3)


class AssumptionViolated(DigraphPerfError, ValueError):
    exit_code = 3


class GainAssumptionViolated(AssumptionViolated):
    pass


class OutputAssumptionViolated(AssumptionViolated):
    pass


class NotNormal(AssumptionViolated):
    pass


class NoComplexObservableMode(AssumptionViolated):
    pass


# Decomposition (exit 4)


class DecompositionError(DigraphPerfError, RuntimeError):
    exit_code = 4


class DefectiveOrIllConditioned(DecompositionError):
    pass


class NoReachableNode(DecompositionError):
    pass


class ResidualTooLarge(DecompositionError):
    pass


class SingularR(DecompositionError):
    pass


class InvalidJordanData(DecompositionError):
    pass


class BlockTooLarge(DecompositionError):
    pass
