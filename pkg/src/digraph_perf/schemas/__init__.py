"""digraph-perf 的数据模式。"""
from .graph import FamilyHint, JordanImport, WeightedDigraph
from .query import (
    Dynamics,
    GainSet,
    InputSpec,
    OutputKind,
    PerformanceQuery,
    PerformanceResult,
)
from .report import (
    ComparisonReport,
    GammaRow,
    MonteCarloReport,
    OmegaRow,
    OracleReport,
    Prediction,
    Relation,
    StarCompleteRow,
    ThresholdReport,
)
from .run import RunConfig

__all__ = [
    "ComparisonReport",
    "Dynamics",
    "FamilyHint",
    "GainSet",
    "GammaRow",
    "InputSpec",
    "JordanImport",
    "MonteCarloReport",
    "OmegaRow",
    "OracleReport",
    "OutputKind",
    "PerformanceQuery",
    "PerformanceResult",
    "Prediction",
    "Relation",
    "RunConfig",
    "StarCompleteRow",
    "ThresholdReport",
    "WeightedDigraph",
]
