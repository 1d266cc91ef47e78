from .covariance import (
    certify_cqn_covariance,
    certify_iqn_covariance,
    decomposition_problem,
    fidelity_from_distance,
    fidelity_upper_bound,
    known_noise_check,
    min_covariance_distance,
)
from .inflation import (
    MeanValueData,
    check_triangle_inflation,
    inflation_sides,
    mean_value_data,
    symmetric_e2_bound,
)
from .norms import (
    block_norms,
    certify_cqn_norms,
    check_mixture_norm_bound,
    check_multi_topology_bound,
    check_norm_inequality_iqn,
)
from .report import BOUNDARY_TOL, DESCRIPTIONS, CertReport, CertStatus, decide, overall_status
from .runner import RunOptions, run_all
from .swap import tighten_gamma_c_trace

__all__ = [
    "BOUNDARY_TOL",
    "DESCRIPTIONS",
    "CertReport",
    "CertStatus",
    "MeanValueData",
    "RunOptions",
    "block_norms",
    "certify_cqn_covariance",
    "certify_cqn_norms",
    "certify_iqn_covariance",
    "check_mixture_norm_bound",
    "check_multi_topology_bound",
    "check_norm_inequality_iqn",
    "check_triangle_inflation",
    "decide",
    "decomposition_problem",
    "fidelity_from_distance",
    "fidelity_upper_bound",
    "inflation_sides",
    "known_noise_check",
    "mean_value_data",
    "min_covariance_distance",
    "overall_status",
    "run_all",
    "symmetric_e2_bound",
    "tighten_gamma_c_trace",
]
