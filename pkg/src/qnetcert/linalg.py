"""Dense linear algebra for small multipartite operators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.matrix
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * scale)


def spectrum(m) -> Spectrum:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending."""
    a = _as_matrix(m)
    w, v = np.linalg.eigh(a)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite operator on a tensor product space.

    ``dims`` lists the local dimension of every party, in order.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray
    tol: float = 1e-8

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid party dimensions {self.dims}")
        mat = np.array(self.matrix, dtype=complex)
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("density matrix has non-finite entries")
        if not is_hermitian(mat, self.tol):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > self.tol:
            raise ValueError(f"density matrix trace is {np.trace(mat).real}, expected 1")
        lam_min = np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]
        if lam_min < -self.tol:
            raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")
        mat = (mat + mat.conj().T) / 2
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims), np.outer(psi, psi.conj()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.matrix, other.matrix)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims})"


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace_array(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (kept in ascending order)."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    t = np.asarray(mat).reshape(dims + dims)
    # einsum letters: rows use 0..n-1, columns n..2n-1; traced columns reuse row letters
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    rows = letters[:n]
    cols = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    res = np.einsum("".join(rows + cols) + "->" + "".join(out), t)
    d = int(np.prod([dims[i] for i in keep]))
    return res.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state of ``rho`` on the parties in ``keep``."""
    keep = sorted(set(keep))
    red = partial_trace_array(rho.matrix, rho.dims, keep)
    return DensityMatrix(tuple(rho.dims[i] for i in keep), red)


def trace_norm(m) -> float:
    """Sum of singular values."""
    a = _as_matrix(m)
    if a.size == 0:
        return 0.0
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError("SVD did not converge") from exc
    return float(np.sum(s))


def max_singular_value(m) -> float:
    a = _as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def purity(rho) -> float:
    """``tr(rho^2)``."""
    a = _as_matrix(rho)
    # tr(A A) for Hermitian A is the squared Frobenius norm
    return float(np.real(np.vdot(a.conj().T, a)))


def numerical_rank(rho, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues above ``tol * lambda_max``."""
    a = _as_matrix(rho)
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    lam_max = w[-1]
    if lam_max <= 0:
        return 0
    return int(np.sum(w > tol * lam_max))


def _pure_vector(a: np.ndarray, tol: float) -> np.ndarray | None:
    w, v = np.linalg.eigh(a)
    if w[-1] > 0 and np.all(w[:-1] <= tol * w[-1]):
        return v[:, -1]
    return None


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def fidelity(rho, sigma, tol: float = DEFAULT_TOL) -> float:
    """Uhlmann fidelity ``[tr sqrt(sqrt(rho) sigma sqrt(rho))]^2``.

    When either argument is (numerically) pure the closed form
    ``<psi|other|psi>`` is used instead of matrix square roots.
    """
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    a = (a + a.conj().T) / 2
    b = (b + b.conj().T) / 2
    for pure, other in ((a, b), (b, a)):
        psi = _pure_vector(pure, tol)
        if psi is not None:
            val = float(np.real(psi.conj() @ other @ psi))
            return min(1.0, max(0.0, val))
    # tr sqrt(sqrt(a) b sqrt(a)) = ||sqrt(a) sqrt(b)||_tr, which avoids square
    # roots of round-off eigenvalues near zero
    val = float(np.sum(np.linalg.svd(_psd_sqrt(a) @ _psd_sqrt(b), compute_uv=False)) ** 2)
    return min(1.0, max(0.0, val))


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * max(1, lambda_max)``.

    Raises:
        ValueError: if ``m`` is not Hermitian within ``tol``.
    """
    a = _as_matrix(m)
    if not is_hermitian(a, tol):
        raise ValueError("is_psd requires a Hermitian matrix")
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return bool(w[0] >= -tol * max(1.0, abs(w[-1])))


def embed_operator(op: np.ndarray, party: int, dims: Sequence[int]) -> np.ndarray:
    """Lift a local operator on ``party`` to the full tensor product space."""
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == party else np.eye(d))
    return out
