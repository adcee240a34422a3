"""Query builders shared by the test modules."""
from typing import Optional

import numpy as np

from digraph_perf.core.graph import deviation_from_average_output
from digraph_perf.schemas import Dynamics, GainSet, InputSpec, OutputKind, PerformanceQuery


def first_order_query(n: int, C: Optional[np.ndarray] = None) -> PerformanceQuery:
    return PerformanceQuery(C=deviation_from_average_output(n) if C is None else C)


def second_order_query(
    n: int,
    gains: GainSet,
    output: OutputKind = OutputKind.POSITION,
    C: Optional[np.ndarray] = None,
    spec: Optional[InputSpec] = None,
) -> PerformanceQuery:
    return PerformanceQuery(
        dynamics=Dynamics.SECOND,
        output=output,
        C=deviation_from_average_output(n) if C is None else C,
        gains=gains,
        input=spec or InputSpec.identity(),
    )


def gains(k_p: float, k_d: float, gamma_p: float, gamma_d: float) -> GainSet:
    return GainSet(k_p=k_p, k_d=k_d, gamma_p=gamma_p, gamma_d=gamma_d)
