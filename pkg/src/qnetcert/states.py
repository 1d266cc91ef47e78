"""Canonical states, measurement collections and covariance matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import DensityMatrix, embed_operator, is_hermitian, numerical_rank, purity
from .network import row_offsets

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class MeasurementCollection:
    """Per-party lists of Hermitian observables with spectra in [-1, 1].

    ``observables[i]`` holds the observables of party ``i``; the covariance
    rows follow this order (party 0 first, then party 1, ...).
    """

    observables: tuple[tuple[np.ndarray, ...], ...]
    tol: float = 1e-9

    def __post_init__(self):
        parties = []
        for i, obs in enumerate(self.observables):
            local = []
            for a in obs:
                a = np.array(a, dtype=complex)
                if a.ndim != 2 or a.shape[0] != a.shape[1]:
                    raise ValueError(f"party {i}: observable must be a square matrix")
                if not is_hermitian(a, self.tol):
                    raise ValueError(f"party {i}: observable is not Hermitian")
                a = (a + a.conj().T) / 2
                if np.max(np.abs(np.linalg.eigvalsh(a))) > 1 + self.tol:
                    raise ValueError(f"party {i}: observable has spectral radius above 1")
                a.setflags(write=False)
                local.append(a)
            dims = {a.shape[0] for a in local}
            if len(dims) > 1:
                raise ValueError(f"party {i}: observables act on different dimensions")
            parties.append(tuple(local))
        object.__setattr__(self, "observables", tuple(parties))

    @property
    def n_parties(self) -> int:
        return len(self.observables)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(obs) for obs in self.observables)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def local_dims(self) -> tuple[int | None, ...]:
        return tuple(obs[0].shape[0] if obs else None for obs in self.observables)

    @property
    def dichotomic(self) -> bool:
        """Every observable has eigenvalues in {-1, +1}."""
        for obs in self.observables:
            for a in obs:
                w = np.linalg.eigvalsh(a)
                if np.max(np.abs(np.abs(w) - 1)) > 1e-7:
                    return False
        return True

    def party_of_row(self) -> list[int]:
        return [i for i, m in enumerate(self.sizes) for _ in range(m)]

    def global_ops(self, dims: Sequence[int]) -> list[np.ndarray]:
        self.check_dims(dims)
        return [embed_operator(a, i, dims) for i, obs in enumerate(self.observables) for a in obs]

    def check_dims(self, dims: Sequence[int]) -> None:
        if len(dims) != self.n_parties:
            raise ValueError(f"state has {len(dims)} parties, measurements have {self.n_parties}")
        for i, (d, ld) in enumerate(zip(dims, self.local_dims)):
            if ld is not None and ld != d:
                raise ValueError(f"party {i}: state dimension {d} vs observable dimension {ld}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeasurementCollection):
            return NotImplemented
        return self.sizes == other.sizes and all(
            np.array_equal(a, b)
            for pa, pb in zip(self.observables, other.observables)
            for a, b in zip(pa, pb)
        )


def pauli_measurements(n: int, label: str = "Z") -> MeasurementCollection:
    """One Pauli observable ``label`` per party, for ``n`` qubits."""
    return MeasurementCollection(tuple((PAULI[label],) for _ in range(n)))


def random_dichotomic(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random ``±1``-valued observable ``U diag(±1) U^†`` with both signs present when ``d > 1``."""
    u = haar_unitary(d, rng)
    k = int(rng.integers(1, d)) if d > 1 else 1
    signs = np.array([1.0] * k + [-1.0] * (d - k))
    return (u * signs) @ u.conj().T


def random_measurements(
    dims: Sequence[int], counts: Sequence[int] | int, rng: np.random.Generator
) -> MeasurementCollection:
    if isinstance(counts, int):
        counts = [counts] * len(dims)
    return MeasurementCollection(
        tuple(tuple(random_dichotomic(d, rng) for _ in range(m)) for d, m in zip(dims, counts))
    )


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Real symmetric PSD matrix with rows grouped into per-party blocks.

    ``sizes[i]`` is the number of rows owned by party ``i``.
    """

    matrix: np.ndarray
    sizes: tuple[int, ...]
    tol: float = 1e-8

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        sizes = tuple(int(m) for m in self.sizes)
        n = sum(sizes)
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match block sizes {sizes}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("covariance matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
        if np.max(np.abs(mat - mat.T), initial=0.0) > self.tol * scale:
            raise ValueError("covariance matrix is not symmetric")
        mat = (mat + mat.T) / 2
        if n and np.linalg.eigvalsh(mat)[0] < -self.tol * scale:
            raise ValueError("covariance matrix is not positive semidefinite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "sizes", sizes)

    @property
    def n_parties(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> list[int]:
        return row_offsets(self.sizes)

    def rows(self, i: int) -> slice:
        off = self.offsets
        return slice(off[i], off[i + 1])

    def block(self, i: int, j: int) -> np.ndarray:
        return self.matrix[self.rows(i), self.rows(j)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CovarianceMatrix):
            return NotImplemented
        return self.sizes == other.sizes and np.array_equal(self.matrix, other.matrix)


def expectations(rho: DensityMatrix, m: MeasurementCollection) -> np.ndarray:
    """Vector of ``tr(rho M_i)`` over all observables in row order."""
    ops = np.array(m.global_ops(rho.dims))
    return np.real(np.einsum("ab,iba->i", rho.matrix, ops))


def covariance(rho: DensityMatrix, m: MeasurementCollection) -> CovarianceMatrix:
    """Covariance matrix ``<M_i M_j> - <M_i><M_j>`` of ``rho``.

    The second moment is symmetrised, ``<(M_i M_j + M_j M_i)/2>``, which only
    matters for two observables of the same party.
    """
    ops = np.array(m.global_ops(rho.dims))
    if len(ops) == 0:
        return CovarianceMatrix(np.zeros((0, 0)), m.sizes)
    a = np.einsum("ab,ibc->iac", rho.matrix, ops)  # rho @ M_i
    second = np.real(np.einsum("iab,jba->ij", a, ops))
    mean = np.real(np.einsum("iaa->i", a))
    gamma = (second + second.T) / 2 - np.outer(mean, mean)
    return CovarianceMatrix(gamma, m.sizes)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Convex decomposition ``rho = sum_k p_k rho_k``."""

    weights: tuple[float, ...]
    components: tuple[DensityMatrix, ...]
    tol: float = 1e-9

    def __post_init__(self):
        w = tuple(float(p) for p in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not w:
            raise ValueError("need one weight per component and at least one component")
        if any(p <= 0 for p in w):
            raise ValueError("weights must be strictly positive")
        if abs(sum(w) - 1) > self.tol:
            raise ValueError(f"weights sum to {sum(w)}, expected 1")
        if len({c.dims for c in comps}) != 1:
            raise ValueError("components act on different spaces")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.components[0].dims

    def state(self) -> DensityMatrix:
        mat = sum(p * c.matrix for p, c in zip(self.weights, self.components))
        return DensityMatrix(self.dims, mat)

    def average_purity(self) -> float:
        return float(sum(p * purity(c) for p, c in zip(self.weights, self.components)))

    def max_rank(self, tol: float = 1e-9) -> int:
        return max(numerical_rank(c, tol) for c in self.components)


def gamma_c(dec: Decomposition, m: MeasurementCollection) -> np.ndarray:
    """Classical-correlation matrix ``sum_k p_k <M_i>_k <M_j>_k - <M_i><M_j>``."""
    means = np.array([expectations(c, m) for c in dec.components])
    p = np.array(dec.weights)
    mean = p @ means
    centred = means - mean
    # centred form is PSD by construction and avoids cancellation
    return np.einsum("k,ki,kj->ij", p, centred, centred)


def ghz(n: int, sign: int = 1) -> DensityMatrix:
    """``(|0...0> ± |1...1>)/sqrt(2)`` on ``n`` qubits."""
    if n < 2:
        raise ValueError("GHZ state needs n >= 2")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    psi[-1] = 1 if sign >= 0 else -1
    return DensityMatrix.from_vector(psi, (2,) * n)


def rho_alpha(alpha: float) -> DensityMatrix:
    """``alpha |+><+| + (1 - alpha) |-><-|`` with ``|±> = (|000> ± |111>)/sqrt(2)``."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    plus = ghz(3, 1).matrix
    minus = ghz(3, -1).matrix
    return DensityMatrix((2, 2, 2), alpha * plus + (1 - alpha) * minus)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = int(np.prod(dims))
    return DensityMatrix(tuple(dims), np.eye(d) / d)
