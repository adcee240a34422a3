import numpy as np
import pytest
from pydantic import ValidationError

from digraph_perf.schemas import (
    ComparisonReport,
    Dynamics,
    GainSet,
    InputSpec,
    MonteCarloReport,
    OutputKind,
    PerformanceQuery,
    Prediction,
    Relation,
    RunConfig,
    StarCompleteRow,
)


class TestGainSet:
    def test_parse(self):
        g = GainSet.parse("1, 2, 5, 6.5")
        assert (g.k_p, g.k_d, g.gamma_p, g.gamma_d) == (1.0, 2.0, 5.0, 6.5)

    def test_parse_wrong_count(self):
        with pytest.raises(ValueError):
            GainSet.parse("1,2,3")

    def test_negative_gain(self):
        with pytest.raises(ValidationError):
            GainSet(k_p=-1.0)

    def test_with_gamma_p(self):
        g = GainSet.parse("1,2,0,6.5").with_gamma_p(3.0)
        assert g.gamma_p == 3.0
        assert g.gamma_d == 6.5


class TestQuery:
    def test_velocity_needs_second_order(self):
        with pytest.raises(ValidationError):
            PerformanceQuery(output=OutputKind.VELOCITY, C=np.zeros((1, 2)))

    def test_second_order_needs_gains(self):
        with pytest.raises(ValidationError):
            PerformanceQuery(dynamics=Dynamics.SECOND, C=np.zeros((1, 2)))

    def test_c_must_be_matrix(self):
        with pytest.raises(ValidationError):
            PerformanceQuery(C=np.zeros(3))

    def test_input_sigma(self):
        assert InputSpec.deterministic([1.0, 2.0]).sigma(2).tolist() == [[1.0, 2.0], [2.0, 4.0]]
        assert InputSpec.identity().sigma(2).tolist() == [[1.0, 0.0], [0.0, 1.0]]

    def test_covariance_needs_payload(self):
        with pytest.raises(ValidationError):
            InputSpec(kind="covariance")


class TestReports:
    def test_consistency(self):
        report = ComparisonReport(
            p_directed=1.0, p_undirected=2.0, relation=Relation.LESS, theorem_prediction=Prediction.GREATER
        )
        assert not report.consistent
        report = report.model_copy(update={"theorem_prediction": Prediction.INDETERMINATE})
        assert report.consistent

    def test_abs_diff(self):
        assert StarCompleteRow(n=3, p_star=0.5, p_complete=0.25).abs_diff == 0.25

    def test_z_score(self):
        assert MonteCarloReport(mean=1.1, standard_error=0.05, h2=1.0, samples=100).z_score == pytest.approx(2.0)


class TestRunConfig:
    def test_sweep_ranges(self):
        config = RunConfig(command="star-complete", n_range="2:49")
        assert config.n_range == (2, 49)
        config = RunConfig(
            command="sweep-gamma", graph="cycle:50,1,1", dynamics="second", gains="1,2,0,6.5", gamma_grid="0:120:61"
        )
        assert config.gamma_grid == (0.0, 120.0, 61)
        assert config.gains.gamma_d == 6.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"command": "compute"},
            {"command": "sweep-omega"},
            {"command": "sweep-omega", "n": 5, "graph": "star:5"},
            {"command": "star-complete"},
            {"command": "compute", "graph": "star:5", "dynamics": "second"},
            {"command": "compute", "graph": "star:5", "gains": "1,1,1,1"},
            {"command": "sweep-gamma", "graph": "cycle:5,1,1", "gamma_grid": "0:1:3"},
            {"command": "compute", "graph": "star:5", "output": "velocity"},
            {"command": "star-complete", "n_range": "2-5"},
        ],
    )
    def test_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            RunConfig(**kwargs)
