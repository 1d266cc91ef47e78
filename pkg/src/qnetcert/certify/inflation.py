"""Triangle inflation inequality on single- and two-party means."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..linalg import DensityMatrix
from ..states import MeasurementCollection, expectations
from .report import BOUNDARY_TOL, CertReport, decide

TRIANGLE_EDGES = ((0, 1), (1, 2), (0, 2))


@dataclass(frozen=True)
class MeanValueData:
    """Means ``E_X`` of one observable per triangle party and the pair means ``E_XY``.

    ``pair_means`` follows :data:`TRIANGLE_EDGES`.
    """

    single: tuple[float, float, float]
    pair_means: tuple[float, float, float]
    tol: float = 1e-9

    def __post_init__(self):
        single = tuple(float(x) for x in self.single)
        pairs = tuple(float(x) for x in self.pair_means)
        if len(single) != 3 or len(pairs) != 3:
            raise ValueError("need three single-party and three pair means")
        for x in single + pairs:
            if not abs(x) <= 1 + self.tol:
                raise ValueError(f"mean value {x} lies outside [-1, 1]")
        object.__setattr__(self, "single", tuple(float(np.clip(x, -1, 1)) for x in single))
        object.__setattr__(self, "pair_means", tuple(float(np.clip(x, -1, 1)) for x in pairs))


def mean_value_data(rho: DensityMatrix, m: MeasurementCollection) -> MeanValueData:
    """Means of the first observable of each party of a three-party state."""
    if m.n_parties != 3 or rho.n_parties != 3:
        raise ValueError("mean-value data is defined for three parties")
    if min(m.sizes) < 1:
        raise ValueError("every party needs at least one observable")
    first = MeasurementCollection(tuple((obs[0],) for obs in m.observables))
    ops = first.global_ops(rho.dims)
    single = expectations(rho, first)
    pairs = [np.real(np.trace(rho.matrix @ ops[a] @ ops[b])) for a, b in TRIANGLE_EDGES]
    return MeanValueData(tuple(single), tuple(pairs))


def inflation_sides(d: MeanValueData, eps: float) -> tuple[float, float]:
    """Left and right sides of the relaxed inflation inequality.

    Each bracket ``1 + |E_X| + |E_Y| + E_XY - 3 eps`` is clamped at zero before
    squaring; the right side is ``6 prod_X (1 + |E_X| + eps)``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    a = [abs(x) for x in d.single]
    lhs = sum(max(0.0, 1 + a[x] + a[y] + exy - 3 * eps) ** 2 for (x, y), exy in zip(TRIANGLE_EDGES, d.pair_means))
    rhs = 6 * math.prod(1 + ax + eps for ax in a)
    return float(lhs), float(rhs)


def check_triangle_inflation(d: MeanValueData, eps: float = 0.0, tol: float = BOUNDARY_TOL) -> CertReport:
    """Verdict of the triangle inflation inequality relaxed by mean drift ``eps``.

    With ``eps = 0`` a violation excludes independent triangle networks; with
    ``eps`` from :func:`qnetcert.bounds.epsilon` it excludes their mixtures.
    """
    lhs, rhs = inflation_sides(d, eps)
    status, margin = decide(lhs, rhs, tol)
    return CertReport("triangle-inflation", "IQN" if eps == 0 else "CQN", status, margin,
                      {"lhs": lhs, "rhs": rhs, "eps": eps})


def symmetric_e2_bound(eps: float) -> float:
    """Largest pair mean allowed when all single means vanish and pair means coincide."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return math.sqrt(2) * (1 + eps) ** 1.5 + 3 * eps - 1
