"""digraph-perf 的核心模块。"""
from .analysis import (
    argmin_omega,
    compare_directed_undirected,
    gamma_p_thresholds,
    gamma_sweep,
    monte_carlo_h2,
    omega_sweep,
    predict_relation,
    star_vs_complete,
)
from .closed_form import (
    assemble_psi,
    h2_normal,
    mode_expansion,
    performance,
    psi_cross_real_eigen,
    psi_diag_diagonalizable_first,
    psi_kk_second_order,
    response_matrix,
    root_case,
    scalar_product_first_order,
    scalar_product_second_order,
    star_performance,
)
from .config import Settings, apply_overrides, settings
from .errors import DigraphPerfError
from .graph import (
    build_laplacian,
    complete_laplacian,
    cyclic_laplacian,
    deviation_from_average_output,
    directed_path_laplacian,
    hermitian_part,
    imploding_star_laplacian,
    local_disorder_output,
    parse_family,
)
from .oracle import (
    assemble,
    covariance_response,
    deflate,
    gramian_psi,
    h2_norm,
    l2_response,
    mode_sylvester,
    simulate_impulse,
    transfer,
)
from .partial_fractions import pf_coefficients_distinct, pf_coefficients_repeated
from .spectral import (
    GeometricWeights,
    SpectralData,
    decompose,
    geometric_weights,
    import_jordan,
    observable_indices,
    sigma_q,
)
from .stability import (
    char_roots,
    check_assumptions,
    io_stable_first_order,
    io_stable_second_order,
)
from .sweep_executor import RowResult, SweepExecutor

__all__ = [
    "DigraphPerfError",
    "GeometricWeights",
    "RowResult",
    "Settings",
    "SpectralData",
    "SweepExecutor",
    "apply_overrides",
    "argmin_omega",
    "assemble",
    "assemble_psi",
    "build_laplacian",
    "char_roots",
    "check_assumptions",
    "compare_directed_undirected",
    "complete_laplacian",
    "covariance_response",
    "cyclic_laplacian",
    "decompose",
    "deflate",
    "deviation_from_average_output",
    "directed_path_laplacian",
    "gamma_p_thresholds",
    "gamma_sweep",
    "geometric_weights",
    "gramian_psi",
    "h2_norm",
    "h2_normal",
    "hermitian_part",
    "import_jordan",
    "imploding_star_laplacian",
    "io_stable_first_order",
    "io_stable_second_order",
    "l2_response",
    "local_disorder_output",
    "mode_expansion",
    "mode_sylvester",
    "monte_carlo_h2",
    "observable_indices",
    "omega_sweep",
    "parse_family",
    "performance",
    "pf_coefficients_distinct",
    "pf_coefficients_repeated",
    "predict_relation",
    "psi_cross_real_eigen",
    "psi_diag_diagonalizable_first",
    "psi_kk_second_order",
    "response_matrix",
    "root_case",
    "scalar_product_first_order",
    "scalar_product_second_order",
    "settings",
    "sigma_q",
    "simulate_impulse",
    "star_performance",
    "star_vs_complete",
    "transfer",
]
