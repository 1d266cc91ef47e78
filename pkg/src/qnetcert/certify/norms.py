"""Trace-norm criteria: the scalar cone program and three closed-form inequalities."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..bounds import PurityProfile, gamma_c_entry_bound, gamma_c_trace_bound
from ..conic import DEFAULT_FEAS_TOL, DEFAULT_INFEAS_TOL, ConicProblem, solve
from ..linalg import trace_norm
from ..network import Network, max_source_size, pairs_within
from ..states import CovarianceMatrix
from .covariance import _check_blocks
from .report import BOUNDARY_TOL, CertReport, CertStatus, decide, from_verdict


def block_norms(gamma: CovarianceMatrix) -> np.ndarray:
    """``n x n`` matrix of block trace norms ``||Γ_ij||_tr``.

    Diagonal blocks are PSD, so their trace norm is the trace.
    """
    n = gamma.n_parties
    out = np.zeros((n, n))
    for i in range(n):
        out[i, i] = max(0.0, float(np.trace(gamma.block(i, i))))
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = trace_norm(gamma.block(i, j)) if gamma.block(i, j).size else 0.0
    return out


def _offdiag_sum(norms: np.ndarray) -> float:
    return float(norms.sum() - np.trace(norms))


def certify_cqn_norms(
    gamma: CovarianceMatrix,
    g: Network,
    p: PurityProfile,
    m_sizes: Sequence[int] | None = None,
    *,
    dichotomic: bool = True,
    feas_tol: float = DEFAULT_FEAS_TOL,
    infeas_tol: float = DEFAULT_INFEAS_TOL,
) -> CertReport:
    """Scalar relaxation of the purity-capped decomposition.

    Unknowns are the trace norms ``u[e, i, j]`` of the source blocks and
    ``c[i, j]`` of the classical term.  Constraints:

    * ``sum_{e ∋ i} u[e,i,i] + c[i,i] = tr Γ_ii`` (PSD diagonal blocks add);
    * ``sum_{e ⊇ {i,j}} u[e,i,j] + c[i,j] >= ||Γ_ij||_tr`` (triangle inequality);
    * ``u[e,i,j]^2 <= u[e,i,i] u[e,j,j]`` and likewise for ``c`` (PSD blocks);
    * ``c[i,j] <= m_i m_j * entry cap`` and ``sum_i c[i,i] <= trace cap``.

    Every quadratic constraint is a rotated cone, so the program is convex.
    """
    _check_blocks(gamma, g)
    sizes = list(gamma.sizes if m_sizes is None else m_sizes)
    if len(sizes) != g.n_parties:
        raise ValueError("m_sizes must list one count per party")
    n = g.n_parties
    norms = block_norms(gamma)
    entry = gamma_c_entry_bound(p) if dichotomic else 2 * math.sqrt(max(0.0, 1 - p.tau**2))
    trace = gamma_c_trace_bound(p)

    problem = ConicProblem()
    # one nonneg vector per source, indexed by its (i <= j) pairs
    src_index: list[dict[tuple[int, int], int]] = []
    for idx, e in enumerate(g.sources):
        pairs = [(i, i) for i in e] + pairs_within(e)
        src_index.append({pq: k for k, pq in enumerate(pairs)})
        problem.add_variable(f"u{idx}", "nonneg", len(pairs))
    cpairs = [(i, j) for i in range(n) for j in range(i, n)]
    cidx = {pq: k for k, pq in enumerate(cpairs)}
    problem.add_variable("c", "nonneg", len(cpairs))

    def row(entries: dict[str, list[int]], coef: float = 1.0) -> dict[str, sp.csr_matrix]:
        out = {}
        for name, ks in entries.items():
            size = problem.variables[name].n_entries
            vec = np.zeros((1, size))
            vec[0, ks] = coef
            out[name] = vec
        return out

    for i in range(n):
        ent = {f"u{s}": [ix[(i, i)]] for s, ix in enumerate(src_index) if (i, i) in ix}
        ent["c"] = [cidx[(i, i)]]
        problem.add_affine(row(ent), [norms[i, i]], "==", f"diagonal trace {i}")
    for i, j in cpairs:
        if i == j:
            continue
        ent = {f"u{s}": [ix[(i, j)]] for s, ix in enumerate(src_index) if (i, j) in ix}
        ent["c"] = [cidx[(i, j)]]
        problem.add_affine(row(ent, -1.0), [-norms[i, j]], "<=", f"off-diagonal cover {i},{j}")
        problem.add_rotated_cone(("c", cidx[(i, j)]), ("c", cidx[(i, i)]), ("c", cidx[(j, j)]))
    for s, ix in enumerate(src_index):
        for (i, j), k in ix.items():
            if i != j:
                problem.add_rotated_cone((f"u{s}", k), (f"u{s}", ix[(i, i)]), (f"u{s}", ix[(j, j)]))

    caps = np.array([sizes[i] * sizes[j] * entry for i, j in cpairs])
    problem.add_affine({"c": sp.eye(len(cpairs))}, caps, "<=", "classical entry caps")
    diag = np.zeros((1, len(cpairs)))
    diag[0, [cidx[(i, i)] for i in range(n)]] = 1
    problem.add_affine({"c": diag}, [trace], "<=", "classical trace cap")

    verdict = solve(problem, feas_tol, infeas_tol)
    details = {"tau": p.tau, "rank": p.r, "entry_bound": entry, "trace_bound": trace, "block_norms": norms}
    return from_verdict("cqn-norms", "CQN", verdict, details)


def check_norm_inequality_iqn(gamma: CovarianceMatrix, g: Network, tol: float = BOUNDARY_TOL) -> CertReport:
    """Per-party monogamy of off-diagonal trace norms for independent networks.

    For every party ``v``::

        sum_{i != v} ||Γ_vi||_tr <= sqrt(k - 1) * sqrt(tr Γ_vv * (tr Γ - tr Γ_vv))

    with ``k`` the largest source size.  This homogeneous form needs no
    variance normalisation; it follows from Cauchy-Schwarz applied to the
    source blocks.
    """
    _check_blocks(gamma, g)
    k = max_source_size(g)
    norms = block_norms(gamma)
    total = float(np.trace(norms))
    per_party = []
    statuses = []
    for v in range(g.n_parties):
        lhs = float(norms[v].sum() - norms[v, v])
        rhs = math.sqrt(k - 1) * math.sqrt(max(0.0, norms[v, v] * (total - norms[v, v])))
        status, margin = decide(lhs, rhs, tol)
        statuses.append(status)
        per_party.append({"party": v, "lhs": lhs, "rhs": rhs, "margin": margin})
    if CertStatus.INCOMPATIBLE in statuses:
        status = CertStatus.INCOMPATIBLE
    elif CertStatus.INDETERMINATE in statuses:
        status = CertStatus.INDETERMINATE
    else:
        status = CertStatus.COMPATIBLE
    worst = min(d["margin"] for d in per_party)
    return CertReport("iqn-norm-inequality", "IQN", status, worst, {"k": k, "parties": per_party})


def check_mixture_norm_bound(
    gamma: CovarianceMatrix, k: int, n: int, gamma_c_trace: float, tol: float = BOUNDARY_TOL
) -> CertReport:
    """``sum_{i != j} ||Γ_ij||_tr <= (k-1) tr Γ + (n-k) tr Γᶜ``.

    Args:
        gamma: covariance with ``n`` party blocks.
        k: largest source size of every network in the mixture.
        n: number of parties.
        gamma_c_trace: cap on ``tr Γᶜ`` (0 for independent networks).
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if gamma.n_parties != n:
        raise ValueError(f"covariance has {gamma.n_parties} parties, expected {n}")
    norms = block_norms(gamma)
    lhs = _offdiag_sum(norms)
    rhs = (k - 1) * float(np.trace(norms)) + (n - k) * gamma_c_trace
    status, margin = decide(lhs, rhs, tol)
    target = "IQN" if gamma_c_trace == 0 else "CQN"
    return CertReport("mixture-norm-bound", target, status, margin,
                      {"lhs": lhs, "rhs": rhs, "k": k, "gamma_c_trace": gamma_c_trace})


def check_multi_topology_bound(
    gamma: CovarianceMatrix,
    n: int,
    c3: int,
    m: int,
    gamma_c_trace: float,
    trace_coefficient: float = 2.0,
    tol: float = BOUNDARY_TOL,
) -> CertReport:
    """``sum_{i != j} ||Γ_ij||_tr <= a tr Γ + (n-2) tr Γᶜ + 3 m c3``.

    Covers mixtures of networks whose sources are bipartite except for at most
    ``c3`` tripartite ones, with at most ``m`` observables per party.  The
    default ``a = 2`` is what the derivation supports; ``a = 1`` is a tighter
    variant kept for comparison and is not backed by a proof here.
    """
    if trace_coefficient not in (1.0, 2.0):
        raise ValueError(f"trace_coefficient must be 1 or 2, got {trace_coefficient}")
    if c3 < 0 or m < 0:
        raise ValueError("c3 and m must be non-negative")
    if gamma.n_parties != n:
        raise ValueError(f"covariance has {gamma.n_parties} parties, expected {n}")
    norms = block_norms(gamma)
    lhs = _offdiag_sum(norms)
    rhs = trace_coefficient * float(np.trace(norms)) + (n - 2) * gamma_c_trace + 3 * m * c3
    status, margin = decide(lhs, rhs, tol)
    target = "IQN" if gamma_c_trace == 0 else "CQN"
    return CertReport("multi-topology-bound", target, status, margin,
                      {"lhs": lhs, "rhs": rhs, "c3": c3, "m": m, "trace_coefficient": trace_coefficient})
