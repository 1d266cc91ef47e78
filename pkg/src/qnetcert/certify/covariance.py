"""Covariance-decomposition criteria and the covariance-distance fidelity bound."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..bounds import PurityProfile, fidelity_trace_bound, gamma_c_entry_bound, gamma_c_trace_bound
from ..conic import (
    DEFAULT_FEAS_TOL,
    DEFAULT_INFEAS_TOL,
    ConicProblem,
    Status,
    Verdict,
    diag_selector,
    embedding,
    solve,
    upper_selector,
)
from ..network import Network, block_projector_indices
from ..states import CovarianceMatrix
from .report import CertReport, CertStatus, from_verdict


def _check_blocks(gamma: CovarianceMatrix, g: Network) -> None:
    if gamma.n_parties != g.n_parties:
        raise ValueError(
            f"covariance has {gamma.n_parties} party blocks but the network has {g.n_parties} parties"
        )


def _source_vars(problem: ConicProblem, gamma: CovarianceMatrix, g: Network) -> dict[str, object]:
    """Add one PSD variable per source with rows in the block map; return the embedded sum terms."""
    n = gamma.matrix.shape[0]
    up = upper_selector(n)
    terms = {}
    for idx, e in enumerate(g.sources):
        rows = block_projector_indices(g, gamma.sizes, e)
        if not rows:
            continue
        name = f"src{idx}"
        problem.add_variable(name, "psd", len(rows))
        terms[name] = up @ embedding(rows, n)
    return terms


def _gamma_c_var(problem: ConicProblem, n: int, entry_bound: float, trace_bound: float) -> object:
    problem.add_variable("gamma_c", "psd", n)
    problem.add_affine({"gamma_c": diag_selector(n)}, np.full(n, entry_bound), "<=", "gamma_c diagonal")
    problem.add_affine(
        {"gamma_c": diag_selector(n).sum(axis=0)}, [trace_bound], "<=", "gamma_c trace"
    )
    return upper_selector(n)


def decomposition_problem(
    gamma: CovarianceMatrix,
    g: Network,
    entry_bound: float | None = None,
    trace_bound: float | None = None,
) -> ConicProblem:
    """``Γ = Σ_e Υ_e (+ Γᶜ)`` with each ``Υ_e`` supported on the rows of source ``e``.

    The classical term ``Γᶜ`` is added only when both bounds are given.
    """
    _check_blocks(gamma, g)
    n = gamma.matrix.shape[0]
    problem = ConicProblem()
    terms = _source_vars(problem, gamma, g)
    if entry_bound is not None and trace_bound is not None and n:
        terms["gamma_c"] = _gamma_c_var(problem, n, entry_bound, trace_bound)
    up = upper_selector(n)
    problem.add_affine(terms, up @ gamma.matrix.ravel(), "==", "covariance split")
    return problem


def _source_blocks(gamma: CovarianceMatrix, g: Network, witness: dict) -> dict[str, np.ndarray]:
    return {str(e): witness[f"src{i}"] for i, e in enumerate(g.sources) if f"src{i}" in witness}


def certify_iqn_covariance(
    gamma: CovarianceMatrix,
    g: Network,
    feas_tol: float = DEFAULT_FEAS_TOL,
    infeas_tol: float = DEFAULT_INFEAS_TOL,
) -> CertReport:
    """Is ``Γ`` a sum of PSD matrices each supported on one source's rows?"""
    if gamma.matrix.size == 0:
        return CertReport("iqn-covariance", "IQN", CertStatus.COMPATIBLE, 0.0)
    verdict = solve(decomposition_problem(gamma, g), feas_tol, infeas_tol)
    details = {}
    if verdict.witness is not None:
        details["source_blocks"] = _source_blocks(gamma, g, verdict.witness)
    return from_verdict("iqn-covariance", "IQN", verdict, details)


def certify_cqn_covariance(
    gamma: CovarianceMatrix,
    g: Network,
    p: PurityProfile,
    *,
    trace_bound: float | None = None,
    dichotomic: bool = True,
    feas_tol: float = DEFAULT_FEAS_TOL,
    infeas_tol: float = DEFAULT_INFEAS_TOL,
) -> CertReport:
    """Purity-capped decomposition ``Γ = Σ_e Υ_e + Γᶜ``.

    ``Γᶜ`` is PSD with diagonal at most :func:`gamma_c_entry_bound` and trace at
    most :func:`gamma_c_trace_bound` (or ``trace_bound`` if smaller, e.g. the
    numerical value from :func:`tighten_gamma_c_trace`).  For observables that
    are not ``±1``-valued only the fidelity branch of the entry cap applies.
    """
    entry = gamma_c_entry_bound(p) if dichotomic else 2 * math.sqrt(max(0.0, 1 - p.tau**2))
    trace = gamma_c_trace_bound(p)
    if trace_bound is not None:
        trace = min(trace, trace_bound)
    if gamma.matrix.size == 0:
        return CertReport("cqn-covariance", "CQN", CertStatus.COMPATIBLE, 0.0)
    verdict = solve(decomposition_problem(gamma, g, entry, trace), feas_tol, infeas_tol)
    details = {"tau": p.tau, "tau0": p.tau0, "rank": p.r, "n0": p.n0, "l1": p.l1,
               "entry_bound": entry, "trace_bound": trace}
    if verdict.witness is not None:
        details["gamma_c"] = verdict.witness["gamma_c"]
        details["source_blocks"] = _source_blocks(gamma, g, verdict.witness)
    return from_verdict("cqn-covariance", "CQN", verdict, details)


def known_noise_check(
    gamma: CovarianceMatrix,
    g: Network,
    noise_gamma,
    eta_range: tuple[float, float] = (0.0, 1.0),
    p: PurityProfile | None = None,
    *,
    feas_tol: float = DEFAULT_FEAS_TOL,
    infeas_tol: float = DEFAULT_INFEAS_TOL,
) -> CertReport:
    """Search ``η`` in ``eta_range`` with ``Γ - (1-η) Γ_n - Γᶜ`` source-decomposable.

    The decomposable part stands for ``η Γ_q``, so the problem stays linear in
    ``η``.  With a profile, ``Γᶜ`` is capped as in :func:`certify_cqn_covariance`;
    without one it is taken to be zero (noise and signal share their means).
    """
    _check_blocks(gamma, g)
    noise = np.asarray(noise_gamma, dtype=float)
    n = gamma.matrix.shape[0]
    if noise.shape != (n, n):
        raise ValueError(f"noise covariance has shape {noise.shape}, expected {(n, n)}")
    if np.linalg.eigvalsh((noise + noise.T) / 2)[0] < -1e-9 * max(1.0, np.abs(noise).max()):
        raise ValueError("noise covariance must be positive semidefinite")
    lo, hi = eta_range
    if not 0 <= lo <= hi <= 1:
        raise ValueError(f"invalid eta range {eta_range}")
    problem = ConicProblem()
    terms = _source_vars(problem, gamma, g)
    if p is not None:
        terms["gamma_c"] = _gamma_c_var(problem, n, gamma_c_entry_bound(p), gamma_c_trace_bound(p))
    up = upper_selector(n)
    problem.add_variable("eta", "free", 1)
    terms["eta"] = -(up @ noise.ravel()).reshape(-1, 1)
    problem.add_affine(terms, up @ (gamma.matrix - noise).ravel(), "==", "noisy covariance split")
    problem.add_affine({"eta": [[1.0], [-1.0]]}, [hi, -lo], "<=", "eta range")
    verdict = solve(problem, feas_tol, infeas_tol)
    details = {"eta_range": [lo, hi]}
    if verdict.witness is not None:
        details["eta"] = float(verdict.witness["eta"][0])
    return from_verdict("known-noise", "IQN" if p is None else "CQN", verdict, details)


def min_covariance_distance(
    gamma: CovarianceMatrix,
    g: Network,
    variance_cap: float | None = 1.0,
    feas_tol: float = DEFAULT_FEAS_TOL,
) -> tuple[float, Verdict]:
    """Smallest ``max_ij |Γ_ij - Γ'_ij|`` over source-decomposable ``Γ'``.

    ``variance_cap`` bounds every ``Γ'_ii``: a covariance of observables with
    spectral radius at most 1 has diagonal at most 1.
    """
    _check_blocks(gamma, g)
    n = gamma.matrix.shape[0]
    up = upper_selector(n)
    problem = ConicProblem()
    terms = _source_vars(problem, gamma, g)
    m = up.shape[0]
    problem.add_variable("t", "nonneg", 1)
    target = up @ gamma.matrix.ravel()
    ones = np.ones((m, 1))
    problem.add_affine({**terms, "t": -ones}, target, "<=", "upper deviation")
    problem.add_affine({**{k: -v for k, v in terms.items()}, "t": -ones}, -target, "<=", "lower deviation")
    if variance_cap is not None:
        diag_rows = [k for k, (i, j) in enumerate(_upper_pairs(n)) if i == j]
        problem.add_affine({k: v[diag_rows] for k, v in terms.items()},
                           np.full(n, variance_cap), "<=", "variance cap")
    problem.minimize({"t": [1.0]})
    verdict = solve(problem, feas_tol)
    if verdict.status is not Status.FEASIBLE or verdict.objective is None:
        return float("nan"), verdict
    return max(0.0, verdict.objective), verdict


def _upper_pairs(n: int) -> list[tuple[int, int]]:
    # same ordering as conic.upper_selector
    return [(i, j) for i in range(n) for j in range(i, n)]


def fidelity_upper_bound(
    gamma_target: CovarianceMatrix,
    g: Network,
    mode: str = "generic",
    *,
    variance_cap: float | None = 1.0,
    feas_tol: float = DEFAULT_FEAS_TOL,
) -> float:
    """Upper bound on the fidelity between the target and any state of ``S_I(g)``.

    ``generic`` inverts ``2 sqrt(1-f) + 2 sqrt(1-f^2) = t0``; ``stabilizer``
    assumes the cross-party products are stabilisers of the target and all
    single-party means vanish, giving ``f <= 1 - t0/6``.

    Raises:
        ArithmeticError: if the distance program is not solved to tolerance.
    """
    if mode not in ("generic", "stabilizer"):
        raise ValueError(f"unknown mode {mode!r}")
    t0, verdict = min_covariance_distance(gamma_target, g, variance_cap, feas_tol)
    if math.isnan(t0):
        raise ArithmeticError(f"covariance-distance program ended {verdict.status.value}: {verdict.message}")
    return fidelity_from_distance(t0, mode, tol=feas_tol)


def fidelity_from_distance(t0: float, mode: str = "generic", tol: float = 0.0) -> float:
    if t0 <= tol:
        return 1.0
    if mode == "stabilizer":
        return max(0.0, 1.0 - t0 / 6.0)
    if t0 >= fidelity_trace_bound(0.0):
        return 0.0
    return float(brentq(lambda f: fidelity_trace_bound(f) - t0, 0.0, 1.0, xtol=1e-15, rtol=1e-15))
