"""Conic feasibility over affine constraints, PSD blocks and rotated second-order cones.

Problems are assembled with :class:`ConicProblem` and solved by :func:`solve`.
The backend is an interior-point solver (Clarabel through cvxpy).  Feasibility
is decided from an elastic reformulation: every affine row is row-equilibrated
and relaxed by a common slack ``s >= 0``; the optimal ``s`` is the
infeasibility measure.  Cone memberships are never relaxed, so the elastic
problem is always feasible.  A returned witness is re-validated against the
raw constraint list by :func:`max_violation`, which does not look at solver
internals.
"""

from __future__ import annotations

import enum
import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import cvxpy as cp
import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

DEFAULT_FEAS_TOL = float(os.environ.get("QNETCERT_TOL", "1e-7"))
DEFAULT_INFEAS_TOL = float(os.environ.get("QNETCERT_TOL", "1e-7"))
DEFAULT_MAX_ITER = 200

_SOLVER_OPTS = dict(tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12, tol_ktratio=1e-10)


class Status(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class VarSpec:
    name: str
    kind: str  # "psd" | "nonneg" | "free"
    size: int  # matrix order for psd, vector length otherwise

    @property
    def n_entries(self) -> int:
        return self.size * self.size if self.kind == "psd" else self.size


@dataclass
class Affine:
    terms: dict[str, sp.csr_matrix]
    rhs: np.ndarray
    sense: str  # "==" or "<="
    label: str = ""


@dataclass(frozen=True)
class RotatedCone:
    """``x^2 <= a * b`` with ``a, b >= 0``; each entry is ``(variable, flat index)``."""

    x: tuple[str, int]
    a: tuple[str, int]
    b: tuple[str, int]


class ConicProblem:
    """Container for variables, affine rows, rotated cones and an optional linear objective.

    PSD variables are real symmetric ``n x n`` matrices addressed by their
    row-major flat index ``i * n + j``.
    """

    def __init__(self):
        self.variables: dict[str, VarSpec] = {}
        self.affine: list[Affine] = []
        self.cones: list[RotatedCone] = []
        self.objective: dict[str, np.ndarray] | None = None

    def add_variable(self, name: str, kind: str, size: int) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name!r}")
        if kind not in ("psd", "nonneg", "free"):
            raise ValueError(f"unknown variable kind {kind!r}")
        if size < 1:
            raise ValueError("variable size must be positive")
        self.variables[name] = VarSpec(name, kind, int(size))
        return name

    def _check_ref(self, ref: tuple[str, int]) -> None:
        name, idx = ref
        if name not in self.variables:
            raise KeyError(f"unknown variable {name!r}")
        if not 0 <= idx < self.variables[name].n_entries:
            raise IndexError(f"index {idx} out of range for {name!r}")

    def add_affine(self, terms: Mapping[str, object], rhs, sense: str = "==", label: str = "") -> None:
        """Add rows ``sum_v A_v @ vec(v) (sense) rhs``."""
        if sense not in ("==", "<="):
            raise ValueError(f"unknown sense {sense!r}")
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        mats = {}
        for name, a in terms.items():
            if name not in self.variables:
                raise KeyError(f"unknown variable {name!r}")
            a = sp.csr_matrix(a, dtype=float)
            if a.shape != (rhs.size, self.variables[name].n_entries):
                raise ValueError(
                    f"{label or 'affine'}: coefficient block for {name!r} has shape {a.shape}, "
                    f"expected {(rhs.size, self.variables[name].n_entries)}"
                )
            mats[name] = a
        self.affine.append(Affine(mats, rhs, sense, label))

    def add_rotated_cone(self, x: tuple[str, int], a: tuple[str, int], b: tuple[str, int]) -> None:
        for ref in (x, a, b):
            self._check_ref(ref)
        self.cones.append(RotatedCone(x, a, b))

    def minimize(self, terms: Mapping[str, object]) -> None:
        obj = {}
        for name, c in terms.items():
            c = np.asarray(c, dtype=float).ravel()
            if c.size != self.variables[name].n_entries:
                raise ValueError(f"objective block for {name!r} has wrong length")
            obj[name] = c
        self.objective = obj


@dataclass
class Verdict:
    status: Status
    witness: dict[str, np.ndarray] | None = None
    max_residual: float = float("nan")
    infeasibility: float = float("nan")
    iterations: int = 0
    objective: float | None = None
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def _row_scales(problem: ConicProblem, row: Affine) -> np.ndarray:
    coef = np.zeros_like(row.rhs)
    for a in row.terms.values():
        if a.nnz:
            coef = np.maximum(coef, abs(a).max(axis=1).toarray().ravel())
    scale = np.maximum(coef, np.abs(row.rhs))
    # a row without variables is a pure consistency check "0 <= b"; measure it
    # against the block's scale, not against its own (possibly round-off) rhs
    free = coef == 0
    if free.any():
        scale[free] = max(coef.max(initial=0.0), np.abs(row.rhs).max(initial=0.0))
    scale[scale == 0] = 1.0
    return scale


def _flat(value: np.ndarray) -> np.ndarray:
    return np.asarray(value, dtype=float).ravel()


def max_violation(problem: ConicProblem, witness: Mapping[str, np.ndarray]) -> float:
    """Largest constraint violation of ``witness`` in row-equilibrated units.

    PSD blocks contribute ``-lambda_min / max(1, |lambda_max|)``; rotated cones
    contribute ``(x^2 - ab) / max(1, x^2, ab)`` and any negativity of ``a, b``.
    """
    worst = 0.0
    for name, spec in problem.variables.items():
        v = np.asarray(witness[name], dtype=float)
        if spec.kind == "psd":
            mat = v.reshape(spec.size, spec.size)
            asym = np.max(np.abs(mat - mat.T), initial=0.0)
            w = np.linalg.eigvalsh((mat + mat.T) / 2)
            worst = max(worst, asym, -w[0] / max(1.0, abs(w[-1])))
        elif spec.kind == "nonneg":
            worst = max(worst, -float(np.min(v, initial=0.0)))
    for row in problem.affine:
        lhs = np.zeros_like(row.rhs)
        for name, a in row.terms.items():
            lhs = lhs + a @ _flat(witness[name])
        r = (lhs - row.rhs) / _row_scales(problem, row)
        worst = max(worst, float(np.max(np.abs(r) if row.sense == "==" else r, initial=0.0)))
    for c in problem.cones:
        x = _flat(witness[c.x[0]])[c.x[1]]
        a = _flat(witness[c.a[0]])[c.a[1]]
        b = _flat(witness[c.b[0]])[c.b[1]]
        worst = max(worst, -a, -b, (x * x - a * b) / max(1.0, x * x, abs(a * b)))
    return float(worst)


def _build(problem: ConicProblem, elastic: bool):
    cvars = {}
    cons = []
    for name, spec in problem.variables.items():
        if spec.kind == "psd":
            v = cp.Variable((spec.size, spec.size), PSD=True, name=name)
            cvars[name] = (v, cp.vec(v, order="C"))
        else:
            v = cp.Variable(spec.size, nonneg=spec.kind == "nonneg", name=name)
            cvars[name] = (v, v)
    slack = cp.Variable(nonneg=True, name="elastic_slack") if elastic else None
    for row in problem.affine:
        scale = _row_scales(problem, row)
        expr = 0
        for name, a in row.terms.items():
            expr = expr + sp.diags(1 / scale) @ a @ cvars[name][1]
        rhs = row.rhs / scale
        if elastic:
            cons.append(expr - rhs <= slack)
            if row.sense == "==":
                cons.append(rhs - expr <= slack)
        elif row.sense == "==":
            cons.append(expr == rhs)
        else:
            cons.append(expr <= rhs)
    for c in problem.cones:
        x = cvars[c.x[0]][1][c.x[1]]
        a = cvars[c.a[0]][1][c.a[1]]
        b = cvars[c.b[0]][1][c.b[1]]
        cons += [a >= 0, b >= 0, cp.SOC(a + b, cp.hstack([2 * x, a - b]))]
    return cvars, cons, slack


def _extract(problem: ConicProblem, cvars) -> dict[str, np.ndarray] | None:
    out = {}
    for name, spec in problem.variables.items():
        val = cvars[name][0].value
        if val is None:
            return None
        val = np.asarray(val, dtype=float)
        if spec.kind == "psd":
            val = (val + val.T) / 2
        out[name] = val
    return out


def _run(prob: cp.Problem, max_iter: int) -> tuple[bool, int, str]:
    try:
        with warnings.catch_warnings():
            # inaccurate solutions are re-validated by max_violation instead
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver=cp.CLARABEL, max_iter=max_iter, **_SOLVER_OPTS)
    except cp.SolverError as exc:
        return False, 0, f"solver error: {exc}"
    stats = prob.solver_stats
    iters = int(stats.num_iters or 0) if stats is not None else 0
    ok = prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
    return ok, iters, str(prob.status)


def solve(
    problem: ConicProblem,
    feas_tol: float = DEFAULT_FEAS_TOL,
    infeas_tol: float = DEFAULT_INFEAS_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    known_feasible: bool = False,
) -> Verdict:
    """Decide feasibility of ``problem`` and, if it has an objective, optimise it.

    ``Infeasible`` is reported only when the elastic slack exceeds
    ``infeas_tol``; ``Feasible`` only when the recovered witness passes
    :func:`max_violation` at ``feas_tol``. Everything else is
    ``Indeterminate``.  ``known_feasible`` skips the elastic phase when the
    caller can exhibit a feasible point and only wants the optimum.
    """
    if known_feasible:
        if problem.objective is None:
            raise ValueError("known_feasible needs an objective")
        return _optimise(problem, feas_tol, max_iter, s_star=0.0, iters=0, witness=None, msg="")
    cvars, cons, slack = _build(problem, elastic=True)
    phase1 = cp.Problem(cp.Minimize(slack), cons)
    ok, iters, msg = _run(phase1, max_iter)
    if not ok or slack.value is None:
        return Verdict(Status.INDETERMINATE, iterations=iters, message=msg)
    s_star = max(0.0, float(slack.value))
    witness = _extract(problem, cvars)
    if s_star > infeas_tol:
        return Verdict(
            Status.INFEASIBLE,
            witness=None,
            max_residual=max_violation(problem, witness) if witness else float("nan"),
            infeasibility=s_star,
            iterations=iters,
            message=msg,
            extra={"elastic_witness": witness},
        )
    if problem.objective is None:
        return _finish(problem, witness, feas_tol, s_star, iters, msg)
    return _optimise(problem, feas_tol, max_iter, s_star, iters, witness, msg)


def _optimise(problem, feas_tol, max_iter, s_star, iters, witness, msg) -> Verdict:
    cvars, cons, _ = _build(problem, elastic=False)
    obj = sum(c @ cvars[name][1] for name, c in problem.objective.items())
    ok, iters2, msg2 = _run(cp.Problem(cp.Minimize(obj), cons), max_iter)
    iters += iters2
    w2 = _extract(problem, cvars) if ok else None
    if w2 is None:
        log.debug("objective phase failed (%s)", msg2)
        return Verdict(Status.INDETERMINATE, witness, infeasibility=s_star, iterations=iters, message=msg2)
    return _finish(problem, w2, feas_tol, s_star, iters, msg2)


def _finish(problem, witness, feas_tol, s_star, iters, msg) -> Verdict:
    if witness is None:
        return Verdict(Status.INDETERMINATE, infeasibility=s_star, iterations=iters, message=msg)
    resid = max_violation(problem, witness)
    objective = None
    if problem.objective is not None:
        objective = float(sum(c @ _flat(witness[name]) for name, c in problem.objective.items()))
    status = Status.FEASIBLE if resid <= feas_tol else Status.INDETERMINATE
    return Verdict(status, witness, resid, s_star, iters, objective, msg)


def embedding(rows: list[int], n: int) -> sp.csr_matrix:
    """Linear map ``vec(Y) -> vec(E Y E^T)`` placing a ``|rows|``-block into an ``n x n`` matrix."""
    k = len(rows)
    data, r_idx, c_idx = [], [], []
    for a, ra in enumerate(rows):
        for b, rb in enumerate(rows):
            r_idx.append(ra * n + rb)
            c_idx.append(a * k + b)
            data.append(1.0)
    return sp.csr_matrix((data, (r_idx, c_idx)), shape=(n * n, k * k))


def upper_selector(n: int) -> sp.csr_matrix:
    """Rows of ``vec`` belonging to the upper triangle (diagonal included)."""
    idx = [i * n + j for i in range(n) for j in range(i, n)]
    return sp.csr_matrix((np.ones(len(idx)), (range(len(idx)), idx)), shape=(len(idx), n * n))


def diag_selector(n: int) -> sp.csr_matrix:
    return sp.csr_matrix((np.ones(n), (range(n), [i * n + i for i in range(n)])), shape=(n, n * n))
