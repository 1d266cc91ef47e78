"""Numerical tightening of the classical-correlation trace cap on two copies of the state.

For a decomposition ``rho = sum_k p_k rho_k`` put ``B = sum_k p_k rho_k ⊗ rho_k``.
Then ``tr Γᶜ = tr[K (B - rho ⊗ rho)]`` with ``K = sum_i M_i ⊗ M_i``.  ``B`` is
PSD, commutes with the swap ``F``, has both marginals equal to ``rho`` and
``tr(F B)`` equal to the average component purity.  Maximising the trace
objective over every such operator gives an upper bound on ``tr Γᶜ``.

Commuting with ``F`` makes ``B`` block diagonal on the symmetric and
antisymmetric subspaces, and each complex Hermitian block is written as
``W^† Y W`` with a real PSD ``Y`` of twice the size.  When the state and
observables are real the blocks are taken real directly.
"""

from __future__ import annotations

import numpy as np

from ..bounds import PurityProfile, gamma_c_trace_bound
from ..conic import DEFAULT_FEAS_TOL, ConicProblem, Status, solve
from ..linalg import DensityMatrix
from ..states import MeasurementCollection

MAX_DIM = 8


def _sym_antisym_bases(d: int) -> tuple[np.ndarray, np.ndarray]:
    sym, anti = [], []
    for a in range(d):
        v = np.zeros(d * d)
        v[a * d + a] = 1
        sym.append(v)
        for b in range(a + 1, d):
            v = np.zeros(d * d)
            v[a * d + b] = v[b * d + a] = 1 / np.sqrt(2)
            sym.append(v)
            w = np.zeros(d * d)
            w[a * d + b], w[b * d + a] = 1 / np.sqrt(2), -1 / np.sqrt(2)
            anti.append(w)
    return np.array(sym).T, np.array(anti).T


def _hermitian_basis(d: int) -> list[np.ndarray]:
    out = []
    for a in range(d):
        for b in range(a, d):
            e = np.zeros((d, d), dtype=complex)
            if a == b:
                e[a, a] = 1
                out.append(e)
                continue
            e[a, b] = e[b, a] = 1
            out.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[a, b], f[b, a] = -1j, 1j
            out.append(f)
    return out


def _real_coeffs(c: np.ndarray, v: np.ndarray, real: bool = False) -> np.ndarray:
    """Coefficients of ``tr(C V W^† Y W V^†)`` in ``vec(Y)`` (row-major).

    With ``real`` the block is a real symmetric matrix and ``W`` is the identity.
    """
    cp_ = v.T @ c @ v
    if real:
        return np.real(cp_).ravel()
    n = cp_.shape[0]
    w_dag = np.hstack([np.eye(n), 1j * np.eye(n)])
    m = w_dag.conj().T @ cp_ @ w_dag
    return np.real(m).ravel()


def swap_program(rho: DensityMatrix, m: MeasurementCollection, tau: float, tau0: float = 1.0) -> tuple[ConicProblem, float]:
    """Build the two-copy program; returns it with the constant ``tr(K rho⊗rho)``."""
    d = rho.dim
    if d > MAX_DIM:
        raise OverflowError(f"two-copy program limited to total dimension {MAX_DIM}, got {d}")
    ops = m.global_ops(rho.dims)
    k = sum(np.kron(a, a) for a in ops) if ops else np.zeros((d * d, d * d))
    # with real data the real part of any feasible operator is feasible and
    # scores the same, so real blocks suffice
    real = not np.iscomplexobj(rho.matrix) or not np.any(rho.matrix.imag)
    real = real and not any(np.any(np.imag(a)) for a in ops)
    factor = 1 if real else 2
    vs, va = _sym_antisym_bases(d)
    problem = ConicProblem()
    blocks = [("sym", vs), ("anti", va)]
    blocks = [(name, v) for name, v in blocks if v.size]
    for name, v in blocks:
        problem.add_variable(name, "psd", factor * v.shape[1])

    basis = _hermitian_basis(d)
    eye = np.eye(d)
    rows = {name: [] for name, _ in blocks}
    rhs = []
    for c in basis:
        big = np.kron(c, eye)
        for name, v in blocks:
            rows[name].append(_real_coeffs(big, v, real))
        rhs.append(np.real(np.trace(c @ rho.matrix)))
    problem.add_affine({name: np.array(r) for name, r in rows.items()}, rhs, "==", "first marginal")

    # tr(F B) = tr Y_sym - tr Y_anti
    swap_rows = {}
    for name, v in blocks:
        n2 = factor * v.shape[1]
        sign = 1.0 if name == "sym" else -1.0
        swap_rows[name] = sign * np.eye(n2).ravel()[None, :]
    problem.add_affine(swap_rows, [tau0], "<=", "swap trace upper")
    problem.add_affine({name: -r for name, r in swap_rows.items()}, [-tau], "<=", "swap trace lower")

    problem.minimize({name: -_real_coeffs(k, v, real) for name, v in blocks})
    const = float(np.real(np.trace(k @ np.kron(rho.matrix, rho.matrix))))
    return problem, const


def tighten_gamma_c_trace(
    rho: DensityMatrix,
    m: MeasurementCollection,
    p: PurityProfile,
    feas_tol: float = DEFAULT_FEAS_TOL,
) -> float:
    """Upper bound on ``tr Γᶜ`` from the two-copy program, never above the analytic cap.

    The positivity of ``tr[(W ⊗ W) B]`` for Hermitian ``W`` is not imposed,
    so this is a relaxation.  Falls back to :func:`gamma_c_trace_bound` when
    the solve is not conclusive.

    Raises:
        OverflowError: if the total dimension exceeds ``MAX_DIM``.
    """
    analytic = gamma_c_trace_bound(p)
    problem, const = swap_program(rho, m, p.tau, p.tau0)
    # rho ⊗ rho is always feasible, so only the optimisation phase is needed
    verdict = solve(problem, feas_tol, known_feasible=True)
    if verdict.status is not Status.FEASIBLE or verdict.objective is None:
        return analytic
    value = -verdict.objective - const
    return float(min(analytic, max(0.0, value)))
