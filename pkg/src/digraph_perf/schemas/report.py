"""比较实验与扫描结果的模式。"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, computed_field


class Relation(str, Enum):
    """Directed performance relative to the undirected counterpart."""
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


class Prediction(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INDETERMINATE = "indeterminate"


class ComparisonReport(BaseModel):
    """Directed vs undirected metric with the relation the theory predicts."""

    p_directed: float
    p_undirected: float
    relation: Relation
    theorem_prediction: Optional[Prediction] = None
    reason: str = Field(default="", description="Which result produced the prediction")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def consistent(self) -> bool:
        if self.theorem_prediction is None:
            return True
        if self.theorem_prediction == Prediction.INDETERMINATE:
            return True
        return self.relation.value == self.theorem_prediction.value


class ThresholdReport(BaseModel):
    """Bracket [γ_l, γ_u] and the sign changes of P(γ_p) − P′(γ_p) inside it."""

    gamma_l: float
    gamma_u: float
    crossings: list[float] = Field(default_factory=list)


class OmegaRow(BaseModel):
    omega: int
    performance: float
    stable: bool


class GammaRow(BaseModel):
    gamma_p: float
    p_directed: float
    p_undirected: float
    stable: bool = True


class StarCompleteRow(BaseModel):
    n: int
    p_star: float
    p_complete: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def abs_diff(self) -> float:
        return abs(self.p_star - self.p_complete)


class OracleReport(BaseModel):
    """Closed form, Gramian and RK4 values with pairwise relative errors."""

    closed_form: float
    gramian: float
    rk4: float
    rel_closed_vs_gramian: float
    rel_closed_vs_rk4: float
    rel_gramian_vs_rk4: float
    passed: bool


class MonteCarloReport(BaseModel):
    mean: float
    standard_error: float
    h2: float
    samples: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def z_score(self) -> float:
        if self.standard_error == 0.0:
            return 0.0
        return (self.mean - self.h2) / self.standard_error
