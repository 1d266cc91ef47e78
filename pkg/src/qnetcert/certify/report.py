from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from ..conic import Status, Verdict

# Relative band around a closed-form inequality inside which the verdict is
# Indeterminate; sized to floating-point rounding of O(1)-O(100) sums.
BOUNDARY_TOL = 1e-12


class CertStatus(enum.Enum):
    COMPATIBLE = "Compatible"
    INCOMPATIBLE = "Incompatible"
    INDETERMINATE = "Indeterminate"


@dataclass
class CertReport:
    """Outcome of one criterion.

    ``margin`` is signed so that negative means violated: ``rhs - lhs`` for
    closed-form inequalities, minus the elastic infeasibility for
    solver-based criteria.  ``Compatible`` means "not excluded", never a
    membership proof.
    """

    criterion: str
    target: str  # "IQN" or "CQN": the set an Incompatible verdict excludes
    status: CertStatus
    margin: float
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def incompatible(self) -> bool:
        return self.status is CertStatus.INCOMPATIBLE

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion,
            "description": DESCRIPTIONS.get(self.criterion, ""),
            "target": self.target,
            "status": self.status.value,
            "margin": self.margin,
            "details": _jsonable(self.details),
        }


DESCRIPTIONS = {
    "iqn-covariance": "covariance splits into PSD source blocks",
    "cqn-covariance": "covariance splits into source blocks plus a purity-capped classical term",
    "cqn-norms": "trace-norm relaxation of the purity-capped decomposition (rotated-cone program)",
    "iqn-norm-inequality": "per-party trace-norm monogamy inequality",
    "mixture-norm-bound": "summed off-diagonal trace norms vs. largest source size",
    "multi-topology-bound": "summed off-diagonal trace norms for mixtures of bi/tripartite networks",
    "triangle-inflation": "triangle inflation inequality on means, relaxed by mean drift",
    "known-noise": "decomposition with a known noise covariance",
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def decide(lhs: float, rhs: float, tol: float = BOUNDARY_TOL) -> tuple[CertStatus, float]:
    """Verdict for a necessary condition ``lhs <= rhs``."""
    margin = float(rhs - lhs)
    band = tol * max(1.0, abs(lhs), abs(rhs))
    if margin < -band:
        return CertStatus.INCOMPATIBLE, margin
    if margin > band:
        return CertStatus.COMPATIBLE, margin
    return CertStatus.INDETERMINATE, margin


def from_verdict(criterion: str, target: str, verdict: Verdict, details: dict | None = None) -> CertReport:
    status = {
        Status.FEASIBLE: CertStatus.COMPATIBLE,
        Status.INFEASIBLE: CertStatus.INCOMPATIBLE,
        Status.INDETERMINATE: CertStatus.INDETERMINATE,
    }[verdict.status]
    info = {
        "solver_status": verdict.status.value,
        "infeasibility": verdict.infeasibility,
        "max_residual": verdict.max_residual,
        "iterations": verdict.iterations,
        "solver_message": verdict.message,
    }
    info.update(details or {})
    return CertReport(criterion, target, status, -verdict.infeasibility, info)


def overall_status(reports: Iterable[CertReport]) -> CertStatus:
    """Incompatible if any criterion fires; Indeterminate only if none decided."""
    reports = list(reports)
    if any(r.status is CertStatus.INCOMPATIBLE for r in reports):
        return CertStatus.INCOMPATIBLE
    if any(r.status is CertStatus.COMPATIBLE for r in reports):
        return CertStatus.COMPATIBLE
    return CertStatus.INDETERMINATE
