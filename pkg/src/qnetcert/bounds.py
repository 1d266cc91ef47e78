"""Purity- and rank-derived caps on classical correlations and mean-value drift."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import DensityMatrix, numerical_rank, purity
from .states import MeasurementCollection


def _check_tau(tau: float) -> None:
    if not 0 < tau <= 1 + 1e-12:
        raise ValueError(f"purity must lie in (0, 1], got {tau}")


def _sqrt_pos(x: float) -> float:
    return math.sqrt(max(0.0, x))


def beta(r: int, tau: float) -> float:
    """``min{r(1 - tau), 2 sqrt(1 - tau^2)}``."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    _check_tau(tau)
    return max(0.0, min(r * (1 - tau), 2 * _sqrt_pos(1 - tau * tau)))


def r_factor(r: int, n0: int) -> float:
    """``max_{1 <= n <= n0} 4 n (r - n) / r``."""
    if not 1 <= n0 <= r:
        raise ValueError(f"need 1 <= n0 <= r, got n0={n0}, r={r}")
    return max(4 * n * (r - n) / r for n in range(1, n0 + 1))


def epsilon(r: int, tau: float) -> float:
    """Mean-value drift cap ``min{sqrt(r(1 - tau)), 2 sqrt(1 - tau)}``."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    _check_tau(tau)
    return min(_sqrt_pos(r * (1 - tau)), 2 * _sqrt_pos(1 - tau))


def mean_drift_bound_frobenius(r: int, n0: int, frob: float) -> float:
    """``sqrt(R) * frob``: caps ``|tr(M(rho - sigma))|`` for sigma in the range of rho."""
    if frob < 0:
        raise ValueError("Frobenius norm must be non-negative")
    return math.sqrt(r_factor(r, n0)) * frob


def fidelity_trace_bound(f: float) -> float:
    """``2 sqrt(1 - f) + 2 sqrt(1 - f^2)``, the covariance-entry gap allowed at fidelity ``f``."""
    if not -1e-12 <= f <= 1 + 1e-12:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")
    return 2 * _sqrt_pos(1 - f) + 2 * _sqrt_pos(1 - f * f)


def l1_constant(m: MeasurementCollection) -> float:
    """Largest singular value of ``sum_i M_i ⊗ M_i`` over all observables.

    Every observable is local, so the operator splits into commuting
    per-party terms ``K_p = sum_{a in p} A_a ⊗ A_a``; its spectrum is the
    set of sums of per-party eigenvalues and only ``d_p^2``-sized
    eigenproblems are needed.
    """
    top = 0.0
    bottom = 0.0
    for obs in m.observables:
        if not obs:
            continue
        k = sum(np.kron(a, a) for a in obs)
        w = np.linalg.eigvalsh((k + k.conj().T) / 2)
        top += w[-1]
        bottom += w[0]
    return float(max(abs(top), abs(bottom)))


@dataclass(frozen=True)
class PurityProfile:
    """Spectral summary of a state feeding every bound.

    ``tau0`` (average component purity) and ``n0`` (largest component rank)
    default to their worst cases 1 and ``r`` when the decomposition is
    unknown. ``tau`` may be a lower bound on the true purity; every bound
    only loosens when it decreases.
    """

    r: int
    tau: float
    l1: float
    tau0: float = 1.0
    n0: int | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("rank must be >= 1")
        _check_tau(self.tau)
        n0 = self.r if self.n0 is None else int(self.n0)
        if not 1 <= n0 <= self.r:
            raise ValueError(f"need 1 <= n0 <= r, got n0={n0}, r={self.r}")
        if not self.tau - 1e-12 <= self.tau0 <= 1 + 1e-12:
            raise ValueError(f"need tau <= tau0 <= 1, got tau={self.tau}, tau0={self.tau0}")
        if self.l1 < 0:
            raise ValueError("l1 must be non-negative")
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "tau", min(1.0, float(self.tau)))
        object.__setattr__(self, "tau0", min(1.0, max(float(self.tau0), self.tau)))

    @classmethod
    def from_state(
        cls,
        rho: DensityMatrix,
        m: MeasurementCollection,
        *,
        tau: float | None = None,
        tau0: float = 1.0,
        n0: int | None = None,
        rank_tol: float = 1e-9,
    ) -> "PurityProfile":
        r = numerical_rank(rho, rank_tol)
        t = purity(rho) if tau is None else tau
        return cls(r=r, tau=min(1.0, t), l1=l1_constant(m), tau0=max(tau0, min(1.0, t)), n0=n0)

    def with_tau(self, tau: float) -> "PurityProfile":
        return replace(self, tau=tau, tau0=max(self.tau0, tau))


def gamma_c_entry_bound(p: PurityProfile) -> float:
    """Cap on every ``|Γᶜ_ij|``: ``min{R(tau0 - tau), 2 sqrt(1 - tau^2)}``.

    With the default ``tau0 = 1, n0 = r`` this never exceeds ``beta(r, tau)``.
    """
    return max(0.0, min(r_factor(p.r, p.n0) * (p.tau0 - p.tau), 2 * _sqrt_pos(1 - p.tau**2)))


def gamma_c_trace_bound(p: PurityProfile) -> float:
    """Cap on ``tr(Γᶜ)``: ``l1 * min{r(tau0 - tau), 2 sqrt(1 - tau^2)}``."""
    return max(0.0, p.l1 * min(p.r * (p.tau0 - p.tau), 2 * _sqrt_pos(1 - p.tau**2)))
