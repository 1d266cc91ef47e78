"""Run every applicable criterion on one state."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..bounds import PurityProfile, epsilon, gamma_c_trace_bound
from ..conic import DEFAULT_FEAS_TOL, DEFAULT_INFEAS_TOL
from ..linalg import DensityMatrix
from ..network import Network, count_sources_by_size, max_source_size, triangle
from ..states import MeasurementCollection, covariance
from .covariance import certify_cqn_covariance, certify_iqn_covariance, known_noise_check
from .inflation import check_triangle_inflation, mean_value_data
from .norms import (
    certify_cqn_norms,
    check_mixture_norm_bound,
    check_multi_topology_bound,
    check_norm_inequality_iqn,
)
from .report import DESCRIPTIONS, CertReport
from .swap import MAX_DIM, tighten_gamma_c_trace

log = logging.getLogger(__name__)

IQN_CRITERIA = ("iqn-covariance", "iqn-norm-inequality", "mixture-norm-bound",
                "multi-topology-bound", "triangle-inflation")
CQN_CRITERIA = ("cqn-covariance", "cqn-norms", "mixture-norm-bound",
                "multi-topology-bound", "triangle-inflation")

_USES_TRACE_CAP = ("cqn-covariance", "mixture-norm-bound", "multi-topology-bound")
TIGHTENING_NOTE = "two-copy relaxation; positivity of tr[(W⊗W)B] for Hermitian W not imposed"


@dataclass
class RunOptions:
    """Knobs for :func:`run_all`.

    ``model`` picks the set being tested: ``"cqn"`` (mixtures of network
    states, the default) or ``"iqn"`` (a single network state).  ``tau`` is
    an optional purity lower bound replacing the computed purity.
    """

    model: str = "cqn"
    criteria: tuple[str, ...] | None = None
    tau: float | None = None
    tau0: float = 1.0
    n0: int | None = None
    tighten: bool = False
    multi_trace_coefficient: float = 2.0
    noise_gamma: np.ndarray | None = None
    feas_tol: float = DEFAULT_FEAS_TOL
    infeas_tol: float = DEFAULT_INFEAS_TOL
    rank_tol: float = 1e-9
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in ("cqn", "iqn"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.criteria is not None:
            unknown = set(self.criteria) - set(DESCRIPTIONS)
            if unknown:
                raise ValueError(f"unknown criteria: {sorted(unknown)}")


def _applicable(options: RunOptions) -> list[str]:
    names = list(CQN_CRITERIA if options.model == "cqn" else IQN_CRITERIA)
    if options.noise_gamma is not None:
        names.append("known-noise")
    if options.criteria is not None:
        names = [c for c in names if c in options.criteria]
    return names


def run_all(
    state: DensityMatrix,
    measurements: MeasurementCollection,
    network: Network,
    options: RunOptions | None = None,
) -> list[CertReport]:
    """Evaluate the criteria of ``options.model`` that fit the inputs.

    Criteria whose preconditions fail (the inflation test off the triangle,
    the multi-topology bound with sources above three parties) are skipped
    rather than reported.
    """
    options = options or RunOptions()
    measurements.check_dims(state.dims)
    if network.n_parties != state.n_parties:
        raise ValueError(f"network has {network.n_parties} parties, state has {state.n_parties}")
    wanted = _applicable(options)
    gamma = covariance(state, measurements)
    profile = PurityProfile.from_state(
        state, measurements, tau=options.tau, tau0=options.tau0, n0=options.n0, rank_tol=options.rank_tol
    )
    dichotomic = measurements.dichotomic
    iqn = options.model == "iqn"
    tol = dict(feas_tol=options.feas_tol, infeas_tol=options.infeas_tol)

    trace_cap = 0.0 if iqn else gamma_c_trace_bound(profile)
    tightened = None
    if options.tighten and not iqn and state.dim <= MAX_DIM:
        tightened = tighten_gamma_c_trace(state, measurements, profile, options.feas_tol)
        trace_cap = min(trace_cap, tightened)
    elif options.tighten and not iqn:
        log.warning("skipping two-copy tightening: dimension %d above %d", state.dim, MAX_DIM)

    n = network.n_parties
    k = max_source_size(network)
    reports: list[CertReport] = []
    for name in wanted:
        if name == "iqn-covariance":
            rep = certify_iqn_covariance(gamma, network, **tol)
        elif name == "cqn-covariance":
            rep = certify_cqn_covariance(gamma, network, profile, trace_bound=tightened,
                                         dichotomic=dichotomic, **tol)
        elif name == "cqn-norms":
            rep = certify_cqn_norms(gamma, network, profile, dichotomic=dichotomic, **tol)
        elif name == "iqn-norm-inequality":
            rep = check_norm_inequality_iqn(gamma, network)
        elif name == "mixture-norm-bound":
            rep = check_mixture_norm_bound(gamma, k, n, trace_cap)
        elif name == "multi-topology-bound":
            if k > 3:
                continue
            c3 = count_sources_by_size(network).get(3, 0)
            rep = check_multi_topology_bound(gamma, n, c3, max(measurements.sizes), trace_cap,
                                             trace_coefficient=options.multi_trace_coefficient)
        elif name == "triangle-inflation":
            if network != triangle() or not dichotomic or min(measurements.sizes) < 1:
                continue
            eps = 0.0 if iqn else epsilon(profile.r, profile.tau)
            rep = check_triangle_inflation(mean_value_data(state, measurements), eps)
        elif name == "known-noise":
            rep = known_noise_check(gamma, network, options.noise_gamma,
                                    p=None if iqn else profile, **tol)
        else:  # pragma: no cover - guarded by RunOptions
            raise AssertionError(name)
        rep.details.setdefault("tau_used", profile.tau)
        if tightened is not None and name in _USES_TRACE_CAP:
            rep.details["trace_cap_tightened"] = tightened
            rep.details["tightening_note"] = TIGHTENING_NOTE
        reports.append(rep)
    return reports
