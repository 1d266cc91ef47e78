import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import block_diag

from qnetcert.linalg import (
    DensityMatrix,
    fidelity,
    is_hermitian,
    is_psd,
    max_singular_value,
    numerical_rank,
    partial_trace,
    purity,
    spectrum,
    tensor,
    trace_norm,
)
from qnetcert.states import PAULI, ghz, rho_alpha
from qnetcert.sampling import haar_unitary

from conftest import random_density

Z = PAULI["Z"]


def test_tensor_identity_and_diagonal():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(tensor(Z, Z), np.diag([1, -1, -1, 1]))


def test_tensor_three_fold_matches_elementwise():
    zzz = tensor(tensor(Z, Z), Z)
    # oracle: entry (a, b) of A⊗B⊗C is A[a1,b1] B[a2,b2] C[a3,b3]
    oracle = np.zeros((8, 8))
    for a in range(8):
        for b in range(8):
            a1, a2, a3 = (a >> 2) & 1, (a >> 1) & 1, a & 1
            b1, b2, b3 = (b >> 2) & 1, (b >> 1) & 1, b & 1
            oracle[a, b] = Z[a1, b1].real * Z[a2, b2].real * Z[a3, b3].real
    assert np.array_equal(zzz, oracle)
    assert np.max(np.abs(zzz)) == 1


def test_partial_trace_product(rng):
    a = random_density(2, 2, rng)
    b = random_density(3, 1, rng)
    rho = DensityMatrix((2, 3), np.kron(a, b))
    assert np.allclose(partial_trace(rho, [0]).matrix, a)
    assert np.allclose(partial_trace(rho, [1]).matrix, b)


def test_partial_trace_ghz_by_summation():
    t = ghz(3).matrix.reshape([2] * 6)
    # oracle: sum the traced indices explicitly
    one = np.zeros((2, 2), dtype=complex)
    two = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            one[i, j] = sum(t[i, k, l, j, k, l] for k in range(2) for l in range(2))
    for a in range(4):
        for b in range(4):
            two[a, b] = sum(t[a >> 1, a & 1, l, b >> 1, b & 1, l] for l in range(2))
    assert np.allclose(one, np.eye(2) / 2)
    assert np.allclose(partial_trace(ghz(3), [0]).matrix, one)
    assert np.allclose(two, np.diag([0.5, 0, 0, 0.5]))
    assert np.allclose(partial_trace(ghz(3), [0, 1]).matrix, two)


def test_partial_trace_empty_keep():
    with pytest.raises(ValueError):
        partial_trace(ghz(3), [])


def test_trace_norm_examples(rng):
    assert trace_norm(np.eye(3)) == pytest.approx(3)
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert trace_norm(np.outer(u, v.conj())) == pytest.approx(1)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = h + h.conj().T
    assert trace_norm(h) == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(h))))


@given(st.integers(0, 2**32 - 1))
def test_trace_norm_direct_sum_and_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 2))
    b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    assert trace_norm(block_diag(a, b)) == pytest.approx(trace_norm(a) + trace_norm(b), rel=1e-10)
    u, v = haar_unitary(3, rng), haar_unitary(2, rng)
    assert trace_norm(u @ a @ v) == pytest.approx(trace_norm(a), rel=1e-10)


def test_purity_examples():
    assert purity(ghz(3)) == pytest.approx(1)
    assert purity(DensityMatrix((2,), np.eye(2) / 2)) == pytest.approx(0.5)
    assert purity(rho_alpha(0.25)) == pytest.approx(0.625)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_purity_matches_spectrum(seed, rank):
    rho = random_density(6, rank, np.random.default_rng(seed))
    lam = spectrum(rho).eigenvalues
    assert purity(rho) == pytest.approx(np.sum(lam**2), rel=1e-12)


def test_spectrum_sorted_and_reconstructs(rng):
    rho = random_density(5, 3, rng)
    s = spectrum(rho)
    assert np.all(np.diff(s.eigenvalues) <= 0)
    recon = (s.eigenvectors * s.eigenvalues) @ s.eigenvectors.conj().T
    assert np.allclose(recon, rho, atol=1e-12)


def test_numerical_rank_examples():
    assert numerical_rank(ghz(3)) == 1
    assert numerical_rank(rho_alpha(0.3)) == 2
    assert numerical_rank(np.eye(8) / 8) == 8


@given(st.integers(0, 2**32 - 1))
def test_numerical_rank_monotone_in_tol(seed):
    rng = np.random.default_rng(seed)
    w = np.sort(10.0 ** rng.uniform(-14, 0, 6))
    rho = np.diag(w / w.sum())
    ranks = [numerical_rank(rho, t) for t in (1e-15, 1e-12, 1e-9, 1e-6, 1e-3, 0.5)]
    assert all(a >= b for a, b in zip(ranks, ranks[1:]))


def test_fidelity_examples():
    zero = DensityMatrix((2,), np.diag([1.0, 0]))
    one = DensityMatrix((2,), np.diag([0, 1.0]))
    assert fidelity(ghz(3), ghz(3)) == pytest.approx(1)
    assert fidelity(zero, one) == pytest.approx(0)
    assert fidelity(zero, np.eye(2) / 2) == pytest.approx(0.5)


def test_fidelity_dim_mismatch():
    with pytest.raises(ValueError):
        fidelity(np.eye(2) / 2, np.eye(4) / 4)


@given(st.integers(0, 2**32 - 1))
def test_fidelity_symmetric_and_above_overlap(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(4, 2, rng), random_density(4, 3, rng)
    f = fidelity(a, b)
    assert f == pytest.approx(fidelity(b, a), abs=1e-9)
    assert f >= np.trace(a @ b).real - 1e-12


def test_fidelity_mixed_path_matches_pure_closed_form(rng):
    # slightly mixed state on both sides still agrees with the limit
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    sigma = random_density(4, 4, rng)
    assert fidelity(np.outer(psi, psi.conj()), sigma) == pytest.approx(np.real(psi.conj() @ sigma @ psi))


def test_max_singular_value():
    assert max_singular_value(np.eye(5)) == pytest.approx(1)
    assert max_singular_value(np.diag([3, -1])) == pytest.approx(3)
    k = sum(np.kron(op, op) for op in (np.kron(np.kron(Z, np.eye(2)), np.eye(2)),
                                         np.kron(np.kron(np.eye(2), Z), np.eye(2)),
                                         np.kron(np.kron(np.eye(2), np.eye(2)), Z)))
    assert max_singular_value(k) == pytest.approx(np.max(np.abs(np.diag(k))))
    assert max_singular_value(k) == pytest.approx(3)


def test_is_psd():
    assert is_psd(np.eye(2))
    assert not is_psd(np.diag([1, -0.1]), 1e-9)
    assert is_psd(np.ones((3, 3)))
    with pytest.raises(ValueError):
        is_psd(np.array([[0, 1], [0, 0]]))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix((2, 2), np.eye(2) / 2)
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.array([[0.5, 0.5], [0, 0.5]]))
    assert is_hermitian(ghz(2).matrix)
    assert not ghz(3).matrix.flags.writeable
