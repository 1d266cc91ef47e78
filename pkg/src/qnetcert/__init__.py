"""Compatibility tests of multipartite states with quantum network topologies."""

from .bounds import PurityProfile, beta, epsilon, gamma_c_entry_bound, gamma_c_trace_bound, l1_constant
from .certify import CertReport, CertStatus, RunOptions, overall_status, run_all
from .linalg import DensityMatrix, fidelity, partial_trace, purity, trace_norm
from .network import Network, cycle, sliding_window, star, triangle
from .states import (
    CovarianceMatrix,
    Decomposition,
    MeasurementCollection,
    covariance,
    ghz,
    pauli_measurements,
    rho_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "CertReport",
    "CertStatus",
    "CovarianceMatrix",
    "Decomposition",
    "DensityMatrix",
    "MeasurementCollection",
    "Network",
    "PurityProfile",
    "RunOptions",
    "beta",
    "covariance",
    "cycle",
    "epsilon",
    "fidelity",
    "gamma_c_entry_bound",
    "gamma_c_trace_bound",
    "ghz",
    "l1_constant",
    "overall_status",
    "partial_trace",
    "pauli_measurements",
    "purity",
    "rho_alpha",
    "run_all",
    "sliding_window",
    "star",
    "trace_norm",
    "triangle",
]
